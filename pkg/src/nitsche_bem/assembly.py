"""Dense Galerkin systems for the conforming, Nitsche-interface and
Nitsche-boundary discretizations of the hypersingular equation.

With ``Vb`` the single layer block on surface curls, ``M`` the trace matrix
and ``P`` the penalty mass on the coupling curve:

* conforming:      ``A = Vb``
* dd:              ``A = Vb + M/2 + (sigma/2) M^T + nu P``, ``M_ij = int (T1 - T2) phi_j [phi_i]``
* weak_boundary:   ``A = Vb + M + sigma M^T + nu P``,       ``M_ij = int T phi_j phi_i``
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .femspace import DofSpace, shape_values
from .potential import BlockCache, PointCache, basis_potentials
from .quadrature import DEFAULT_REGULAR_ORDER, DEFAULT_SINGULAR_ORDER, EDGE_ORDER, tensor_2d


@dataclass(frozen=True)
class NuRule:
    """Penalty parameter ``c`` or ``c |log h_min|^p``."""

    c: float
    power: int = 0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"penalty constant must be positive, got {self.c}")
        if self.power not in (0, 1, 2, 3):
            raise ValueError(f"log power must be in 0..3, got {self.power}")

    def __call__(self, h_min: float) -> float:
        return self.c * abs(np.log(h_min)) ** self.power

    @classmethod
    def parse(cls, text: str) -> "NuRule":
        """``const:<c>`` or ``logpow:<p>:<c>``; a bare number means ``const``."""
        m = re.fullmatch(r"const:([^:]+)", text)
        if m:
            return cls(float(m.group(1)))
        m = re.fullmatch(r"logpow:(\d+):([^:]+)", text)
        if m:
            return cls(float(m.group(2)), int(m.group(1)))
        try:
            return cls(float(text))
        except ValueError:
            raise ValueError(f"cannot parse nu rule {text!r}") from None

    def __str__(self):
        return f"const:{self.c:g}" if self.power == 0 else f"logpow:{self.power}:{self.c:g}"


@dataclass(frozen=True)
class NitscheConfig:
    mode: str = "weak_boundary"
    sigma: int = -1
    nu_rule: NuRule = field(default_factory=lambda: NuRule(1.0))
    order_regular: int = DEFAULT_REGULAR_ORDER
    order_singular: int = DEFAULT_SINGULAR_ORDER
    order_edge: int = EDGE_ORDER

    def __post_init__(self):
        if self.sigma not in (-1, 1):
            raise ValueError(f"sigma must be -1 or 1, got {self.sigma}")


@dataclass(frozen=True)
class LinearSystem:
    A: np.ndarray
    b: np.ndarray
    nu: float = 0.0
    sigma: int = 0


def assemble_v_block(space: DofSpace, cache: BlockCache | None = None, chunk: int = 64) -> np.ndarray:
    """``<V curl_T phi_j, curl_T phi_i>`` over all panel pairs.

    For a conforming space this is the Galerkin matrix of the hypersingular
    operator.  The pair loop is blocked over test panels; summation order is
    fixed, so results are reproducible bit for bit.  Both quadrature
    evaluations ``(P, Q)`` and ``(Q, P)`` of an entry are averaged, which makes
    the matrix symmetric exactly (on non-matching pairs the two differ at the
    level of the quadrature error).
    """
    cache = cache or BlockCache()
    rects = space.mesh.rects
    pd = space.panel_dofs
    n = space.n_dofs
    nP = len(rects)
    acc = np.zeros(n * n)
    for s in range(0, nP, chunk):
        Pi = np.arange(s, min(s + chunk, nP))
        I = np.repeat(Pi, nP)
        J = np.tile(np.arange(nP), len(Pi))
        B = cache.blocks(rects[I], rects[J])
        rows = np.broadcast_to(pd[I][:, :, None], B.shape)
        cols = np.broadcast_to(pd[J][:, None, :], B.shape)
        ok = (rows >= 0) & (cols >= 0)
        acc += np.bincount((rows * n + cols)[ok], weights=B[ok], minlength=n * n)
    V = acc.reshape(n, n)
    return 0.5 * (V + V.T)


def _gamma_data(space: DofSpace, order_edge: int, segments=None):
    pts, w, t = space.gamma_rule(order_edge, segments)
    J = space.trace_matrix(pts)
    return pts, w, t, J


def assemble_trace_operator(space: DofSpace, points, tangents, cache: PointCache | None = None) -> np.ndarray:
    """Trace operator values at ``points``: ``(T1 - T2) phi_j = 2 t1 . V curl phi_j``
    in ``dd`` mode, ``T phi_j = t . V curl phi_j`` in ``weak_boundary`` mode."""
    B = basis_potentials(space, points, cache)
    D = np.einsum("qjc,qc->qj", B, tangents)
    return 2.0 * D if space.mode == "dd" else D


def assemble_trace_matrix(space: DofSpace, order_edge: int = EDGE_ORDER,
                          cache: PointCache | None = None) -> np.ndarray:
    """``M_ij = int_gamma (T phi_j) [phi_i] ds`` (see module docstring)."""
    if space.mode == "conforming":
        raise ValueError("the trace matrix is undefined for conforming spaces")
    pts, w, t, J = _gamma_data(space, order_edge)
    D = assemble_trace_operator(space, pts, t, cache)
    return J.T @ (w[:, None] * D)


def assemble_penalty_mass(space: DofSpace, order_edge: int = EDGE_ORDER,
                          segments=None) -> np.ndarray:
    """``P_ij = int_gamma [phi_j][phi_i] ds``, optionally over selected pieces
    of the coupling curve only."""
    if space.mode == "conforming":
        raise ValueError("the penalty mass is undefined for conforming spaces")
    pts, w, t, J = _gamma_data(space, order_edge, segments)
    P = J.T @ (w[:, None] * J)
    return 0.5 * (P + P.T)


def assemble_rhs(space: DofSpace, f=1.0, order: int = DEFAULT_REGULAR_ORDER) -> np.ndarray:
    """``b_i = int f phi_i``; ``f`` is a constant or a callable on points."""
    rects = space.mesh.rects
    pd = space.panel_dofs
    b = np.zeros(space.n_dofs)
    for R, dofs in zip(rects, pd):
        rule = tensor_2d(order, R)
        fv = f(rule.points) if callable(f) else np.full(len(rule.weights), float(f))
        loc = (rule.weights * fv) @ shape_values(R, rule.points)
        for a in range(4):
            if dofs[a] >= 0:
                b[dofs[a]] += loc[a]
    return b


@dataclass
class SystemParts:
    """Everything except the ``(sigma, nu)`` combination, so parameter sweeps on
    one mesh assemble the expensive blocks once."""

    space: DofSpace
    V: np.ndarray
    b: np.ndarray
    M: np.ndarray | None = None
    P: np.ndarray | None = None

    def combine(self, sigma: int = -1, nu: float = 1.0) -> LinearSystem:
        mode = self.space.mode
        if mode == "conforming":
            return LinearSystem(self.V.copy(), self.b.copy())
        if sigma not in (-1, 1):
            raise ValueError(f"sigma must be -1 or 1, got {sigma}")
        if not nu > 0:
            raise ValueError(f"nu must be positive, got {nu}")
        if mode == "dd":
            A = self.V + 0.5 * self.M + 0.5 * sigma * self.M.T + nu * self.P
        else:
            A = self.V + self.M + sigma * self.M.T + nu * self.P
        return LinearSystem(A, self.b.copy(), nu=nu, sigma=sigma)


def assemble_parts(space: DofSpace, f=1.0, order_regular: int = DEFAULT_REGULAR_ORDER,
                   order_singular: int = DEFAULT_SINGULAR_ORDER,
                   order_edge: int = EDGE_ORDER) -> SystemParts:
    V = assemble_v_block(space, BlockCache(order_regular, order_singular))
    b = assemble_rhs(space, f, order_regular)
    if space.mode == "conforming":
        return SystemParts(space, V, b)
    pcache = PointCache(order_regular, order_singular)
    M = assemble_trace_matrix(space, order_edge, pcache)
    P = assemble_penalty_mass(space, order_edge)
    return SystemParts(space, V, b, M, P)


def assemble_system(space: DofSpace, config: NitscheConfig, f=1.0) -> LinearSystem:
    """Full system for ``config`` with ``nu`` evaluated on the current mesh."""
    if space.mode != config.mode:
        raise ValueError(f"space mode {space.mode!r} does not match config mode {config.mode!r}")
    parts = assemble_parts(space, f, config.order_regular, config.order_singular, config.order_edge)
    return parts.combine(config.sigma, config.nu_rule(space.mesh.h_min))


def dump_matrix(A: np.ndarray, path) -> None:
    """Row-major plain text, ``%.17g``."""
    np.savetxt(path, np.atleast_2d(A), fmt="%.17g")
