"""Quadrature rules on rectangular panels, edges and panel pairs.

All panels are axis-aligned rectangles ``(x0, x1, y0, y1)`` in the plane of
the screen.  Besides the plain Gauss-Legendre tensor rules this module
provides regularized rules for integrands carrying the weakly singular factor
``1/|x - y|``:

* :func:`singular_pair_rule` handles a pair of touching panels.  Each
  coordinate direction is rewritten in relative coordinates (identical
  intervals) or in "distance from the contact point" coordinates (adjacent
  intervals); the variables that vanish at the singularity form a cube
  ``[0, 1]^m`` which is split into ``m`` pyramids and Duffy-transformed.
  The Jacobian ``xi^(m-1)`` cancels the kernel singularity, so the
  transformed integrand is analytic and Gauss rules converge exponentially.
  This is the quadrilateral Sauter-Schwab construction written directly in
  terms of the two coordinate directions, which also covers rectangles of
  different sizes.
* :func:`pair_rule` splits arbitrary (possibly non-conforming) panel pairs into
  pieces whose contact is conforming, and applies admissibility-based
  subdivision to nearby separated pieces.
* :func:`near_singular_point_rule` integrates ``g(y)/|x - y|`` over a panel for
  a point ``x`` on or near the panel by a signed fan of triangles with apex
  ``x``, using polar coordinates and a ``sinh`` substitution along each edge.

Weights returned by every rule integrate the *full* integrand (kernel
included); callers evaluate ``1/|x - y|`` at the returned points, which never
coincide.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from enum import Enum

import numpy as np

DEFAULT_REGULAR_ORDER = 5
DEFAULT_SINGULAR_ORDER = 6
EDGE_ORDER = 4

_TOL = 1e-12


@dataclass(frozen=True)
class QuadRule:
    """Points ``(n, d)`` and weights ``(n,)``.

    Weights are positive except for fan rules whose apex lies outside the
    panel, where the triangles opposite the apex enter with a negative sign.
    """

    points: np.ndarray
    weights: np.ndarray

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.points)))


@dataclass(frozen=True)
class PairRule:
    """Quadrature on a product of two panels: ``sum w * f(x, y)``."""

    x: np.ndarray
    y: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)


class PanelPairClass(Enum):
    SEPARATED = 0
    VERTEX_ADJACENT = 1
    EDGE_ADJACENT = 2
    COINCIDENT = 4


@functools.lru_cache(maxsize=None)
def _gauss01(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order < 1:
        raise ValueError(f"quadrature order must be >= 1, got {order}")
    t, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (t + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_1d(order: int, a: float = 0.0, b: float = 1.0) -> QuadRule:
    """Gauss-Legendre rule with ``order`` points on ``[a, b]``.

    Exact for polynomials of degree ``2 * order - 1``.
    """
    x, w = _gauss01(order)
    return QuadRule((a + (b - a) * x)[:, None], (b - a) * w)


def tensor_2d(order: int, rect=(0.0, 1.0, 0.0, 1.0)) -> QuadRule:
    """Tensor Gauss rule on a rectangle ``(x0, x1, y0, y1)``."""
    x0, x1, y0, y1 = rect
    g, w = _gauss01(order)
    X, Y = np.meshgrid(x0 + (x1 - x0) * g, y0 + (y1 - y0) * g, indexing="ij")
    W = np.outer(w, w) * (x1 - x0) * (y1 - y0)
    return QuadRule(np.column_stack([X.ravel(), Y.ravel()]), W.ravel())


def _tensor_grid(rules):
    """Full tensor product of 1D (points, weights) pairs."""
    pts = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wts = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    P = np.column_stack([p.ravel() for p in pts])
    W = np.prod(np.column_stack([w.ravel() for w in wts]), axis=1)
    return P, W


# --------------------------------------------------------------------------
# interval and panel relations


def interval_relation(I, J) -> str:
    """Relation of closed interval ``J`` to ``I``.

    One of ``"same"``, ``"left"`` (J ends where I starts), ``"right"``
    (J starts where I ends), ``"separated"`` or ``"overlap"`` (anything else,
    which must be resolved by splitting).
    """
    a0, a1 = I
    b0, b1 = J
    scale = max(a1 - a0, b1 - b0)
    tol = _TOL * scale
    if abs(a0 - b0) <= tol and abs(a1 - b1) <= tol:
        return "same"
    if abs(b1 - a0) <= tol:
        return "left"
    if abs(b0 - a1) <= tol:
        return "right"
    if b1 < a0 - tol or b0 > a1 + tol:
        return "separated"
    return "overlap"


def classify_pair(P, Q) -> PanelPairClass:
    """Classify two rectangles whose contact (if any) is conforming.

    For panels of one conforming mesh this coincides with counting shared
    nodes (0, 1, 2 or 4).  Raises ``ValueError`` for partial overlaps, which
    :func:`split_pair` resolves.
    """
    rx = interval_relation(P[:2], Q[:2])
    ry = interval_relation(P[2:], Q[2:])
    if "overlap" in (rx, ry):
        raise ValueError(f"panels {P} and {Q} are not in conforming contact")
    if "separated" in (rx, ry):
        return PanelPairClass.SEPARATED
    n_same = (rx == "same") + (ry == "same")
    return (PanelPairClass.VERTEX_ADJACENT, PanelPairClass.EDGE_ADJACENT,
            PanelPairClass.COINCIDENT)[n_same]


def _split_interval(I, J):
    cuts = [c for c in J if I[0] + _TOL * (I[1] - I[0]) < c < I[1] - _TOL * (I[1] - I[0])]
    pts = [I[0], *sorted(cuts), I[1]]
    return [(pts[k], pts[k + 1]) for k in range(len(pts) - 1)]


def split_pair(P, Q):
    """Split two rectangles so every piece pair is in conforming contact.

    Each interval is cut at the endpoints of the other one that fall strictly
    inside it.  Returns lists of sub-rectangles for ``P`` and ``Q``.
    """
    px = _split_interval(P[:2], Q[:2])
    py = _split_interval(P[2:], Q[2:])
    qx = _split_interval(Q[:2], P[:2])
    qy = _split_interval(Q[2:], P[2:])
    Ps = [(a[0], a[1], b[0], b[1]) for a in px for b in py]
    Qs = [(a[0], a[1], b[0], b[1]) for a in qx for b in qy]
    return Ps, Qs


def rect_distance(P, Q) -> float:
    dx = max(0.0, Q[0] - P[1], P[0] - Q[1])
    dy = max(0.0, Q[2] - P[3], P[2] - Q[3])
    return float(np.hypot(dx, dy))


def rect_diameter(P) -> float:
    return float(np.hypot(P[1] - P[0], P[3] - P[2]))


# --------------------------------------------------------------------------
# singular pair rules


def _duffy_cube(m: int, order: int):
    """Rule on ``[0,1]^m`` graded towards the origin.

    The cube is split into ``m`` pyramids according to the largest
    coordinate; on pyramid ``j`` the coordinates are ``w_j = xi`` and
    ``w_i = xi * eta_i``.  The weights carry the Jacobian ``xi^(m-1)``.
    """
    g, gw = _gauss01(order)
    P, W = _tensor_grid([(g, gw)] * m)
    xi = P[:, 0]
    eta = P[:, 1:]
    W = W * xi ** (m - 1)
    blocks = []
    for j in range(m):
        w = np.empty_like(P)
        others = [i for i in range(m) if i != j]
        w[:, j] = xi
        w[:, others] = xi[:, None] * eta
        blocks.append(w)
    return np.vstack(blocks), np.tile(W, m)


def _coordinate_maps(I, J, rel):
    """Per-coordinate parametrizations for a non-separated interval pair.

    Returns a list of variants; each variant is
    ``(n_singular, n_smooth, map)`` where ``map(w, s) -> (x, y, jac)`` takes
    the singular variables ``w`` (vanish at the contact) and smooth ones ``s``.
    """
    a0, a1 = I
    b0, b1 = J
    if rel == "same":
        L = a1 - a0

        def plus(w, s):
            r = w[:, 0]
            x = a0 + (1.0 - r) * L * s[:, 0]
            return x, x + r * L, L * L * (1.0 - r)

        def minus(w, s):
            r = w[:, 0]
            y = a0 + (1.0 - r) * L * s[:, 0]
            return y + r * L, y, L * L * (1.0 - r)

        return [(1, 1, plus), (1, 1, minus)]
    A = a1 - a0
    B = b1 - b0
    if rel == "left":
        c = a0

        def left(w, s):
            return c + A * w[:, 0], c - B * w[:, 1], np.full(len(w), A * B)

        return [(2, 0, left)]
    if rel == "right":
        c = a1

        def right(w, s):
            return c - A * w[:, 0], c + B * w[:, 1], np.full(len(w), A * B)

        return [(2, 0, right)]
    raise ValueError(f"interval relation {rel!r} has no singular parametrization")


def singular_pair_rule(cls: PanelPairClass, order: int, P, Q) -> PairRule:
    """Regularized rule for touching panels ``P`` and ``Q``.

    ``cls`` must agree with :func:`classify_pair`; the pair must be in
    conforming contact (coincident, sharing a full edge, or sharing only a
    vertex).  The rule integrates ``g(x, y)/|x - y|`` for smooth ``g`` with
    exponential convergence in ``order``.
    """
    actual = classify_pair(P, Q)
    if cls is not actual or cls is PanelPairClass.SEPARATED:
        raise ValueError(f"cannot build a singular rule for class {cls} (pair is {actual})")
    return _singular_pair_rule(order, tuple(map(float, P)), tuple(map(float, Q)))


@functools.lru_cache(maxsize=4096)
def _singular_pair_rule(order, P, Q) -> PairRule:
    rx = interval_relation(P[:2], Q[:2])
    ry = interval_relation(P[2:], Q[2:])
    g, gw = _gauss01(order)
    xs, ys, ws = [], [], []
    for nx_sing, nx_smooth, mx in _coordinate_maps(P[:2], Q[:2], rx):
        for ny_sing, ny_smooth, my in _coordinate_maps(P[2:], Q[2:], ry):
            m = nx_sing + ny_sing
            W_cube, w_cube = _duffy_cube(m, order)
            n_smooth = nx_smooth + ny_smooth
            if n_smooth:
                S, w_s = _tensor_grid([(g, gw)] * n_smooth)
            else:
                S, w_s = np.zeros((1, 0)), np.ones(1)
            # full tensor product of singular-cube points and smooth points
            iw = np.repeat(np.arange(len(w_cube)), len(w_s))
            is_ = np.tile(np.arange(len(w_s)), len(w_cube))
            Wc = W_cube[iw]
            Sc = S[is_]
            x1, y1, j1 = mx(Wc[:, :nx_sing], Sc[:, :nx_smooth])
            x2, y2, j2 = my(Wc[:, nx_sing:], Sc[:, nx_smooth:])
            xs.append(np.column_stack([x1, x2]))
            ys.append(np.column_stack([y1, y2]))
            ws.append(w_cube[iw] * w_s[is_] * j1 * j2)
    return PairRule(np.vstack(xs), np.vstack(ys), np.concatenate(ws))


def regular_pair_rule(P, Q, order: int, eta: float = 1.0) -> PairRule:
    """Tensor Gauss rule on ``P x Q`` with admissibility-based subdivision.

    While ``dist(P, Q) < eta * max(diam P, diam Q)`` the larger panel (both if
    of similar size) is split into four and the test is repeated.
    """
    xs, ys, ws = [], [], []
    stack = [(tuple(P), tuple(Q))]
    while stack:
        A, B = stack.pop()
        dA, dB = rect_diameter(A), rect_diameter(B)
        dist = rect_distance(A, B)
        if dist <= 0.0:
            raise ValueError(f"regular rule requested for touching panels {A}, {B}")
        if dist >= eta * max(dA, dB):
            ra = tensor_2d(order, A)
            rb = tensor_2d(order, B)
            na, nb = len(ra.weights), len(rb.weights)
            xs.append(np.repeat(ra.points, nb, axis=0))
            ys.append(np.tile(rb.points, (na, 1)))
            ws.append(np.outer(ra.weights, rb.weights).ravel())
            continue
        As = _quarter(A) if dA >= 0.7 * dB else [A]
        Bs = _quarter(B) if dB >= 0.7 * dA else [B]
        stack.extend((a, b) for a in As for b in Bs)
    return PairRule(np.vstack(xs), np.vstack(ys), np.concatenate(ws))


def _quarter(R):
    xm = 0.5 * (R[0] + R[1])
    ym = 0.5 * (R[2] + R[3])
    return [(R[0], xm, R[2], ym), (xm, R[1], R[2], ym),
            (R[0], xm, ym, R[3]), (xm, R[1], ym, R[3])]


def pair_rule(P, Q, order_regular: int = DEFAULT_REGULAR_ORDER,
              order_singular: int = DEFAULT_SINGULAR_ORDER) -> PairRule:
    """Rule for ``g(x, y)/|x - y|`` on an arbitrary pair of panels.

    Panels may overlap only along their boundaries.  Non-conforming contacts
    (as across an interface with non-matching grids) are split first.
    """
    P = tuple(map(float, P))
    Q = tuple(map(float, Q))
    Ps, Qs = split_pair(P, Q)
    xs, ys, ws = [], [], []
    for A in Ps:
        for B in Qs:
            cls = classify_pair(A, B)
            if cls is PanelPairClass.SEPARATED:
                r = regular_pair_rule(A, B, order_regular)
            else:
                r = _singular_pair_rule(order_singular, A, B)
            xs.append(r.x)
            ys.append(r.y)
            ws.append(r.weights)
    return PairRule(np.vstack(xs), np.vstack(ys), np.concatenate(ws))


# --------------------------------------------------------------------------
# point-panel rules


def near_singular_point_rule(rect, x, order: int = DEFAULT_SINGULAR_ORDER) -> QuadRule:
    """Rule for ``y -> g(y)/|x - y|`` on a panel, with ``x`` in the panel plane.

    For ``dist(x, rect) > 2 diam(rect)`` the plain tensor rule is returned.
    Otherwise the panel is written as a signed sum of triangles with apex
    ``x`` (one per edge, so ``x`` may lie inside, on the boundary, or outside
    the panel).  On each triangle polar coordinates around ``x`` remove the
    singularity; the angle is parametrized through ``s = d sinh(tau)`` along the
    edge, which keeps the angular integrand smooth when ``x`` is close to the
    edge line.
    """
    x = np.asarray(x, dtype=float)
    x0, x1, y0, y1 = map(float, rect)
    diam = np.hypot(x1 - x0, y1 - y0)
    dx = max(0.0, x0 - x[0], x[0] - x1)
    dy = max(0.0, y0 - x[1], x[1] - y1)
    if np.hypot(dx, dy) > 2.0 * diam:
        return tensor_2d(order, rect)
    corners = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    g, gw = _gauss01(order)
    pts, wts = [], []
    for k in range(4):
        a = corners[k]
        b = corners[(k + 1) % 4]
        e = b - a
        L = np.hypot(*e)
        e = e / L
        cross = e[0] * (x[1] - a[1]) - e[1] * (x[0] - a[0])
        d = abs(cross)
        if d <= _TOL * diam:
            continue
        # positive for triangles oriented like the panel
        sign = 1.0 if cross > 0 else -1.0
        # arclength coordinates of a, b relative to the foot of the perpendicular
        sa = np.dot(a - x, e)
        sb = sa + L
        foot = x + (a - x) - sa * e
        ta, tb = np.arcsinh(sa / d), np.arcsinh(sb / d)
        tau = ta + (tb - ta) * g
        wt = (tb - ta) * gw / np.cosh(tau)
        R = d * np.cosh(tau)
        q = foot[None, :] + (d * np.sinh(tau))[:, None] * e[None, :]
        u = (q - x[None, :]) / R[:, None]
        rho = R[:, None] * g[None, :]
        y = x[None, None, :] + rho[..., None] * u[:, None, :]
        # dy = rho drho dtheta, so the weight for f = g/|x-y| carries rho
        w = sign * wt[:, None] * (R[:, None] * gw[None, :]) * rho
        pts.append(y.reshape(-1, 2))
        wts.append(w.ravel())
    return QuadRule(np.vstack(pts), np.concatenate(wts))
