"""Continuous piecewise bilinear nodal spaces and their traces on the coupling curve.

Modes
-----
``conforming``
    One mesh, nodes on the screen boundary are constrained to zero.
``weak_boundary``
    One mesh, every node is a degree of freedom; the boundary condition is
    imposed weakly and the "jump" on the screen boundary is the trace itself.
``dd``
    Two independently meshed subdomains.  Interface nodes exist once per side
    and are free, so functions may jump across the interface; nodes on the
    screen boundary (including the two interface end points) are constrained.

Counting (``dd``, matching ``n x n`` grids split at a panel line): the
dimension equals the conforming dimension ``(n - 1)^2`` plus the ``n - 1``
interior interface nodes, which carry a second copy.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import Decomposition, Mesh, boundary_decomposition
from .quadrature import EDGE_ORDER, gauss_1d

MODES = ("conforming", "weak_boundary", "dd")

_TOL = 1e-10


def _local(rect, point, strict=True):
    x0, x1, y0, y1 = rect
    p = np.asarray(point, dtype=float)
    xi = (p[..., 0] - x0) / (x1 - x0)
    eta = (p[..., 1] - y0) / (y1 - y0)
    if strict and np.any((xi < -_TOL) | (xi > 1 + _TOL) | (eta < -_TOL) | (eta > 1 + _TOL)):
        raise ValueError(f"point {point} lies outside panel {tuple(rect)}")
    return xi, eta


def shape_values(rect, point, strict=True) -> np.ndarray:
    """All four bilinear shape functions at ``point`` (shape ``(..., 4)``).

    With ``strict=False`` points outside the panel evaluate the polynomial
    extension instead of raising.
    """
    xi, eta = _local(rect, point, strict)
    ax = np.stack([1 - xi, xi, xi, 1 - xi], axis=-1)
    ay = np.stack([1 - eta, 1 - eta, eta, eta], axis=-1)
    return ax * ay


def shape_gradients(rect, point, strict=True) -> np.ndarray:
    """Gradients of the four shape functions, shape ``(..., 4, 2)``."""
    x0, x1, y0, y1 = rect
    xi, eta = _local(rect, point, strict)
    sx = np.array([-1.0, 1.0, 1.0, -1.0])
    sy = np.array([-1.0, -1.0, 1.0, 1.0])
    ax = np.stack([1 - xi, xi, xi, 1 - xi], axis=-1)
    ay = np.stack([1 - eta, 1 - eta, eta, eta], axis=-1)
    gx = sx * ay / (x1 - x0)
    gy = sy * ax / (y1 - y0)
    return np.stack([gx, gy], axis=-1)


def shape_value(rect, local_node: int, point) -> float:
    return shape_values(rect, point)[..., local_node]


def shape_curl(rect, local_node: int, point) -> np.ndarray:
    """Surface curl ``(d/dy phi, -d/dx phi)`` of one shape function."""
    g = shape_gradients(rect, point)[..., local_node, :]
    return np.stack([g[..., 1], -g[..., 0]], axis=-1)


@dataclass(frozen=True)
class DofSpace:
    mesh: Mesh
    mode: str
    decomposition: Optional[Decomposition]
    dof_of_node: np.ndarray
    node_of_dof: np.ndarray

    @property
    def n_dofs(self) -> int:
        return len(self.node_of_dof)

    @property
    def panel_dofs(self) -> np.ndarray:
        """``(n_panels, 4)`` global dof per local node, ``-1`` if constrained."""
        return self.dof_of_node[self.mesh.panels]

    @property
    def active_nodes(self) -> dict:
        side = self.mesh.node_side[self.node_of_dof]
        return {s: self.node_of_dof[side == s] for s in np.unique(self.mesh.node_side)}

    def interpolate(self, f) -> np.ndarray:
        """Nodal interpolant of ``f(points) -> values`` on the free nodes."""
        return np.asarray(f(self.mesh.nodes[self.node_of_dof]), dtype=float) * np.ones(self.n_dofs)

    def gamma_rule(self, order: int = EDGE_ORDER, segments=None):
        """Gauss points on every merged piece of the coupling curve (or on
        the pieces indexed by ``segments``).

        Returns ``(points, weights, tangents)``.
        """
        if self.decomposition is None:
            raise ValueError("conforming spaces have no coupling curve")
        sel = slice(None) if segments is None else np.atleast_1d(segments)
        seg = self.decomposition.segments[sel]
        g = gauss_1d(order)
        s = g.points[:, 0]
        pts = seg[:, None, 0, :] + s[None, :, None] * (seg[:, None, 1, :] - seg[:, None, 0, :])
        w = self.decomposition.lengths[sel][:, None] * g.weights[None, :]
        t = np.repeat(self.decomposition.tangents[sel], len(s), axis=0)
        return pts.reshape(-1, 2), w.ravel(), t

    def trace_matrix(self, points) -> np.ndarray:
        """``[phi_i](x_q)`` for every dof, shape ``(n_points, n_dofs)``.

        In ``dd`` mode side-1 traces enter with ``+`` and side-2 traces with
        ``-``; in ``weak_boundary`` mode this is the plain trace.
        """
        points = np.atleast_2d(points)
        rects = self.mesh.rects
        pd = self.panel_dofs
        out = np.zeros((len(points), self.n_dofs))
        sides = (1, 2) if self.mode == "dd" else (1,)
        for s in sides:
            sign = 1.0 if s == 1 else -1.0
            mask = self.mesh.subdomain_of_panel == s
            R = rects[mask]
            D = pd[mask]
            tol = _TOL * self.mesh.h
            inside = ((points[:, None, 0] >= R[None, :, 0] - tol) & (points[:, None, 0] <= R[None, :, 1] + tol)
                      & (points[:, None, 1] >= R[None, :, 2] - tol) & (points[:, None, 1] <= R[None, :, 3] + tol))
            for q in range(len(points)):
                hits = np.flatnonzero(inside[q])
                if len(hits) == 0:
                    raise ValueError(f"point {points[q]} is not on side {s}")
                k = hits[0]
                vals = shape_values(R[k], points[q])
                for a in range(4):
                    if D[k, a] >= 0:
                        out[q, D[k, a]] = sign * vals[a]
        return out

    def trace_on_edge(self, dof: int, edge, s: float) -> float:
        """Value of basis function ``dof`` at arclength ``s`` along ``edge``.

        The edge is a pair of node indices; the value is taken from the side
        owning ``dof`` and is zero if its node is not an end point of the edge.
        """
        a, b = edge
        pa, pb = self.mesh.nodes[a], self.mesh.nodes[b]
        L = float(np.linalg.norm(pb - pa))
        if s < -_TOL * L or s > L * (1 + _TOL):
            raise ValueError(f"arclength {s} outside edge of length {L}")
        node = self.node_of_dof[dof]
        if node == a:
            return 1.0 - s / L
        if node == b:
            return s / L
        return 0.0


def make_space(mesh: Mesh, mode: str, decomposition: Optional[Decomposition] = None) -> DofSpace:
    """Free nodes numbered in node order."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    side_count = len(np.unique(mesh.subdomain_of_panel))
    if mode == "dd":
        if decomposition is None or decomposition.split_x is None or side_count != 2:
            raise ValueError("dd mode needs a two-subdomain mesh and its interface")
        free = ~mesh.on_screen_boundary()
    elif mode == "weak_boundary":
        if side_count != 1:
            raise ValueError("weak_boundary mode works on a single-domain mesh")
        decomposition = decomposition or boundary_decomposition(mesh)
        free = np.ones(mesh.n_nodes, bool)
    else:
        if side_count != 1:
            raise ValueError("conforming mode works on a single-domain mesh")
        decomposition = None
        free = ~mesh.on_screen_boundary()
    node_of_dof = np.flatnonzero(free)
    dof_of_node = np.full(mesh.n_nodes, -1)
    dof_of_node[node_of_dof] = np.arange(len(node_of_dof))
    return DofSpace(mesh, mode, decomposition, dof_of_node, node_of_dof)
