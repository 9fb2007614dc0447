"""Single layer potential of surface curls of bilinear basis functions.

Two kinds of integrals are needed:

* panel-pair blocks ``(1/4pi) int_P int_Q curl phi_a(x) . curl phi_b(y) / |x - y|``
  (a ``4 x 4`` matrix per pair, local nodes ``a`` on ``P`` and ``b`` on ``Q``);
* point values ``(1/4pi) int_R curl phi_a(y) / |x - y| dy`` (a ``4 x 2`` array).

Both are translation invariant and homogeneous under scaling (pair blocks of
degree one, point values of degree zero), so they are computed once per
normalized geometry and reused; on uniform grids this reduces the work from
``O(N^2)`` quadratures to ``O(N)``.
"""
from __future__ import annotations

import numpy as np

from .femspace import DofSpace, shape_gradients
from .quadrature import (DEFAULT_REGULAR_ORDER, DEFAULT_SINGULAR_ORDER, _gauss01,
                         near_singular_point_rule, pair_rule)

FOUR_PI = 4.0 * np.pi
_KEY_DIGITS = 9


def kernel(x, y):
    """``1/(4 pi |x - y|)`` for points in the screen plane (last axis)."""
    return 1.0 / (FOUR_PI * np.linalg.norm(np.asarray(x) - np.asarray(y), axis=-1))


def _rotate(g):
    """Gradient -> surface curl: ``(gx, gy) -> (gy, -gx)``."""
    return np.stack([g[..., 1], -g[..., 0]], axis=-1)


def _ref_tensor(order):
    g, w = _gauss01(order)
    X, Y = np.meshgrid(g, g, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    return pts, np.outer(w, w).ravel(), shape_gradients((0.0, 1.0, 0.0, 1.0), pts)


def _sizes(R):
    return np.column_stack([R[:, 1] - R[:, 0], R[:, 3] - R[:, 2]])


def _rect_dist(P, Q):
    dx = np.maximum(0.0, np.maximum(Q[:, 0] - P[:, 1], P[:, 0] - Q[:, 1]))
    dy = np.maximum(0.0, np.maximum(Q[:, 2] - P[:, 3], P[:, 2] - Q[:, 3]))
    return np.hypot(dx, dy)


# --------------------------------------------------------------------------
# panel-pair blocks


def pair_block(P, Q, order_regular=DEFAULT_REGULAR_ORDER, order_singular=DEFAULT_SINGULAR_ORDER):
    """V-Galerkin block of one panel pair (singular and near pairs included)."""
    r = pair_rule(P, Q, order_regular, order_singular)
    gx = shape_gradients(P, r.x, strict=False)
    gy = shape_gradients(Q, r.y, strict=False)
    k = r.weights / (FOUR_PI * np.linalg.norm(r.x - r.y, axis=1))
    return np.einsum("n,nac,nbc->ab", k, gx, gy)


def _far_blocks(P, Q, order, chunk=2048):
    pts, w, G = _ref_tensor(order)
    out = np.empty((len(P), 4, 4))
    for s in range(0, len(P), chunk):
        p, q = P[s:s + chunk], Q[s:s + chunk]
        sp, sq = _sizes(p), _sizes(q)
        x = p[:, None, [0, 2]] + pts[None] * sp[:, None, :]
        y = q[:, None, [0, 2]] + pts[None] * sq[:, None, :]
        gp = G[None] / sp[:, None, None, :]
        gq = G[None] / sq[:, None, None, :]
        wp = w[None] * (sp[:, 0] * sp[:, 1])[:, None]
        wq = w[None] * (sq[:, 0] * sq[:, 1])[:, None]
        kern = wp[:, :, None] * wq[:, None, :] / (
            FOUR_PI * np.linalg.norm(x[:, :, None, :] - y[:, None, :, :], axis=-1))
        t = np.einsum("kpr,krbc->kpbc", kern, gq)
        out[s:s + chunk] = np.einsum("kpac,kpbc->kab", gp, t)
    return out


def pair_blocks(P, Q, order_regular=DEFAULT_REGULAR_ORDER, order_singular=DEFAULT_SINGULAR_ORDER):
    """Blocks for arrays of pairs ``P[k], Q[k]`` (rows ``(x0, x1, y0, y1)``).

    Well separated pairs (distance at least the larger diameter) are
    evaluated in one vectorized tensor-Gauss pass; the others go through
    :func:`pair_block`.
    """
    P = np.asarray(P, dtype=float).reshape(-1, 4)
    Q = np.asarray(Q, dtype=float).reshape(-1, 4)
    out = np.empty((len(P), 4, 4))
    diam = np.maximum(np.hypot(*_sizes(P).T), np.hypot(*_sizes(Q).T))
    far = _rect_dist(P, Q) >= diam
    if far.any():
        out[far] = _far_blocks(P[far], Q[far], order_regular)
    for k in np.flatnonzero(~far):
        out[k] = pair_block(P[k], Q[k], order_regular, order_singular)
    return out


def _normalize_pairs(P, Q):
    """Translation/scale normalized geometry: ``P`` moved to the origin and
    scaled to unit width.  Returns ``(keys, scale)``."""
    h = P[:, 1] - P[:, 0]
    o = P[:, [0, 0, 2, 2]]
    key = np.column_stack([(P - o) / h[:, None], (Q - o) / h[:, None]])
    return np.round(key, _KEY_DIGITS) + 0.0, h


class BlockCache:
    """Memo of pair blocks keyed by normalized geometry."""

    def __init__(self, order_regular=DEFAULT_REGULAR_ORDER, order_singular=DEFAULT_SINGULAR_ORDER):
        self.order_regular = order_regular
        self.order_singular = order_singular
        self._store: dict[bytes, np.ndarray] = {}

    def __len__(self):
        return len(self._store)

    def blocks(self, P, Q) -> np.ndarray:
        keys, h = _normalize_pairs(np.asarray(P, float), np.asarray(Q, float))
        uniq, inv = np.unique(keys, axis=0, return_inverse=True)
        inv = inv.ravel()
        vals = np.empty((len(uniq), 4, 4))
        missing = []
        for u, row in enumerate(uniq):
            hit = self._store.get(row.tobytes())
            if hit is None:
                missing.append(u)
            else:
                vals[u] = hit
        if missing:
            m = np.array(missing)
            new = pair_blocks(uniq[m, :4], uniq[m, 4:], self.order_regular, self.order_singular)
            for u, b in zip(m, new):
                self._store[uniq[u].tobytes()] = b
                vals[u] = b
        return vals[inv] * h[:, None, None]


# --------------------------------------------------------------------------
# point potentials


def _far_point(points, R, order, chunk=4096):
    pts, w, G = _ref_tensor(order)
    curl = _rotate(G)
    out = np.empty((len(points), 4, 2))
    for s in range(0, len(points), chunk):
        x, r = points[s:s + chunk], R[s:s + chunk]
        sz = _sizes(r)
        y = r[:, None, [0, 2]] + pts[None] * sz[:, None, :]
        c = curl[None] / sz[:, None, None, ::-1]
        wk = w[None] * (sz[:, 0] * sz[:, 1])[:, None] / (
            FOUR_PI * np.linalg.norm(y - x[:, None, :], axis=-1))
        out[s:s + chunk] = np.einsum("kp,kpac->kac", wk, c)
    return out


def point_potential(x, R, order=DEFAULT_SINGULAR_ORDER):
    """``(1/4pi) int_R curl phi_a(y)/|x - y| dy`` for the 4 local nodes of ``R``."""
    rule = near_singular_point_rule(R, x, order)
    c = _rotate(shape_gradients(R, rule.points, strict=False))
    k = rule.weights / (FOUR_PI * np.linalg.norm(rule.points - np.asarray(x)[None], axis=1))
    return np.einsum("n,nac->ac", k, c)


class PointCache:
    """Memo of near-field point potentials (scale invariant, so keyed by
    geometry normalized with the panel width)."""

    def __init__(self, order_regular=DEFAULT_REGULAR_ORDER, order_singular=DEFAULT_SINGULAR_ORDER):
        self.order_regular = order_regular
        self.order_singular = order_singular
        self._store: dict[bytes, np.ndarray] = {}

    def potentials(self, points, R) -> np.ndarray:
        """Curl potentials for pairs ``(points[k], R[k])``, shape ``(K, 4, 2)``."""
        points = np.asarray(points, float).reshape(-1, 2)
        R = np.asarray(R, float).reshape(-1, 4)
        sz = _sizes(R)
        diam = np.hypot(*sz.T)
        dx = np.maximum(0.0, np.maximum(R[:, 0] - points[:, 0], points[:, 0] - R[:, 1]))
        dy = np.maximum(0.0, np.maximum(R[:, 2] - points[:, 1], points[:, 1] - R[:, 3]))
        far = np.hypot(dx, dy) > 2.0 * diam
        out = np.empty((len(R), 4, 2))
        if far.any():
            out[far] = _far_point(points[far], R[far], self.order_regular)
        near = np.flatnonzero(~far)
        if len(near):
            h = sz[near, 0]
            o = R[near][:, [0, 2]]
            key = np.column_stack([(points[near] - o) / h[:, None], sz[near] / h[:, None]])
            key = np.round(key, _KEY_DIGITS) + 0.0
            for k, row in zip(near, key):
                b = row.tobytes()
                hit = self._store.get(b)
                if hit is None:
                    ref = (0.0, row[2], 0.0, row[3])
                    hit = point_potential(row[:2], ref, self.order_singular)
                    self._store[b] = hit
                out[k] = hit
        return out


def basis_potentials(space: DofSpace, points, cache: PointCache | None = None,
                     chunk: int = 64) -> np.ndarray:
    """``(V curl_T phi_j)(x_q)`` for every dof, shape ``(n_points, n_dofs, 2)``.

    Each basis curl is supported on the panels of its own subdomain only.
    """
    cache = cache or PointCache()
    points = np.atleast_2d(np.asarray(points, float))
    rects = space.mesh.rects
    pd = space.panel_dofs
    nP = len(rects)
    out = np.zeros((len(points), space.n_dofs, 2))
    valid = pd >= 0
    for s in range(0, len(points), chunk):
        xs = points[s:s + chunk]
        X = np.repeat(xs, nP, axis=0)
        R = np.tile(rects, (len(xs), 1))
        pot = cache.potentials(X, R).reshape(len(xs), nP, 4, 2)
        for q in range(len(xs)):
            for c in range(2):
                out[s + q, :, c] = np.bincount(pd[valid], weights=pot[q][..., c][valid],
                                               minlength=space.n_dofs)
    return out


def _check_not_node(space: DofSpace, x):
    d = np.min(np.linalg.norm(space.mesh.nodes - np.asarray(x)[None], axis=1))
    if d < 1e-10 * space.mesh.h:
        raise ValueError(f"potential requested at mesh node {tuple(x)}")


def potential_at(space: DofSpace, x, coeffs, cache: PointCache | None = None) -> np.ndarray:
    """Vector potential ``(V curl_T v)(x)`` of the discrete function ``v``."""
    _check_not_node(space, x)
    B = basis_potentials(space, np.asarray(x, float)[None], cache)[0]
    return np.asarray(coeffs, float) @ B


def tangent_at(space: DofSpace, x, side: int = 1) -> np.ndarray:
    """Unit tangent ``t_side`` of the coupling curve at ``x``; ``t2 = -t1``."""
    dec = space.decomposition
    if dec is None:
        raise ValueError("conforming spaces have no coupling curve")
    seg = dec.segments
    a, b = seg[:, 0], seg[:, 1]
    ab = b - a
    L = np.linalg.norm(ab, axis=1)
    s = np.einsum("ij,ij->i", np.asarray(x)[None] - a, ab) / L**2
    off = np.abs(ab[:, 0] * (x[1] - a[:, 1]) - ab[:, 1] * (x[0] - a[:, 0])) / L
    hit = np.flatnonzero((s >= 0) & (s <= 1) & (off < 1e-10 * space.mesh.h))
    if len(hit) == 0:
        raise ValueError(f"{tuple(x)} is not on the coupling curve")
    t = dec.tangents[hit[0]]
    if side == 2:
        if space.mode != "dd":
            raise ValueError("side 2 exists only in dd mode")
        return -t
    return t


def trace_T(space: DofSpace, side: int, coeffs, x, cache: PointCache | None = None) -> float:
    """``T_side v (x) = t_side . (V curl_T v)(x)``.

    The single layer potential is continuous across the interface, so both
    sides share one evaluation and ``T_1 v + T_2 v = 0`` holds exactly.
    """
    return float(tangent_at(space, x, side) @ potential_at(space, x, coeffs, cache))


def v_galerkin_entry(space: DofSpace, i: int, j: int, cache: BlockCache | None = None) -> float:
    """``(1/4pi) int int curl phi_j(y) . curl phi_i(x) / |x - y|``."""
    cache = cache or BlockCache()
    pd = space.panel_dofs
    rects = space.mesh.rects
    Pi, ai = np.nonzero(pd == i)
    Pj, aj = np.nonzero(pd == j)
    if len(Pi) == 0 or len(Pj) == 0:
        raise ValueError("dof index out of range")
    I = np.repeat(np.arange(len(Pi)), len(Pj))
    J = np.tile(np.arange(len(Pj)), len(Pi))
    B = cache.blocks(rects[Pi[I]], rects[Pj[J]])
    return float(np.sum(B[np.arange(len(I)), ai[I], aj[J]]))
