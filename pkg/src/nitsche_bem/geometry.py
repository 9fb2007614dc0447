"""Rectangular meshes of a flat screen and their two-subdomain decompositions.

Node and panel numbering is row-major (x fastest).  Panels list their four
nodes counterclockwise starting at the lower-left corner.  In a decomposed
mesh the nodes of side 1 come first, followed by the nodes of side 2; nodes on
the interface are duplicated, one copy per side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

MAX_N = 4096


@dataclass(frozen=True)
class Screen:
    """Axis-aligned rectangle in the plane ``z = 0`` (normal ``(0, 0, 1)``)."""

    x_range: tuple[float, float] = (0.0, 1.0)
    y_range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        (a, b), (c, d) = self.x_range, self.y_range
        if not (b > a and d > c):
            raise ValueError(f"empty screen {self.x_range} x {self.y_range}")

    @property
    def width(self) -> float:
        return self.x_range[1] - self.x_range[0]

    @property
    def height(self) -> float:
        return self.y_range[1] - self.y_range[0]

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray
    panels: np.ndarray
    subdomain_of_panel: np.ndarray
    boundary_edges: np.ndarray
    interface_edges: dict = field(default_factory=dict)
    h: float = 0.0
    h_min: float = 0.0
    node_side: Optional[np.ndarray] = None
    screen: Screen = Screen()

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_panels(self) -> int:
        return len(self.panels)

    @property
    def rects(self) -> np.ndarray:
        """Panels as ``(x0, x1, y0, y1)`` rows."""
        lo = self.nodes[self.panels[:, 0]]
        hi = self.nodes[self.panels[:, 2]]
        return np.column_stack([lo[:, 0], hi[:, 0], lo[:, 1], hi[:, 1]])

    def on_screen_boundary(self) -> np.ndarray:
        """Boolean mask of nodes lying on the outer boundary of the screen."""
        (a, b), (c, d) = self.screen.x_range, self.screen.y_range
        x, y = self.nodes[:, 0], self.nodes[:, 1]
        tol = 1e-12 * max(self.screen.width, self.screen.height)
        return (np.abs(x - a) < tol) | (np.abs(x - b) < tol) | (np.abs(y - c) < tol) | (
            np.abs(y - d) < tol)


@dataclass(frozen=True)
class Decomposition:
    """The coupling curve: the interface for two subdomains, or the screen
    boundary when the boundary condition is imposed weakly.

    ``segments`` holds start/end points of pieces on which every trace is
    linear (breakpoints of both sides merged); ``tangents`` are unit vectors,
    the side-1 tangent ``t1`` on an interface and the counterclockwise tangent
    on the screen boundary.
    """

    split_x: Optional[float]
    segments: np.ndarray
    tangents: np.ndarray

    @property
    def lengths(self) -> np.ndarray:
        return np.linalg.norm(self.segments[:, 1] - self.segments[:, 0], axis=1)


def _grid(x0, x1, y0, y1, nx, ny, offset=0):
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    j, i = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    k = (j * (nx + 1) + i).ravel() + offset
    panels = np.column_stack([k, k + 1, k + nx + 2, k + nx + 1])
    return nodes, panels


def _ring(nx, ny, offset=0):
    """Counterclockwise boundary node loop of an ``nx x ny`` grid."""
    idx = lambda i, j: offset + j * (nx + 1) + i
    loop = [idx(i, 0) for i in range(nx)]
    loop += [idx(nx, j) for j in range(ny)]
    loop += [idx(i, ny) for i in range(nx, 0, -1)]
    loop += [idx(0, j) for j in range(ny, 0, -1)]
    return loop


def build_uniform_mesh(screen: Screen, n: int) -> Mesh:
    """``n`` square panels across the width; the height must fit squares."""
    if n < 1 or n > MAX_N:
        raise ValueError(f"n must be in [1, {MAX_N}], got {n}")
    h = screen.width / n
    m_real = screen.height / h
    m = int(round(m_real))
    if m < 1 or abs(m - m_real) > 1e-9 * m_real:
        raise ValueError(f"screen {screen} cannot be tiled by squares of side {h}")
    nodes, panels = _grid(*screen.x_range, *screen.y_range, n, m)
    loop = _ring(n, m)
    edges = np.array([(loop[k], loop[(k + 1) % len(loop)]) for k in range(len(loop))])
    return Mesh(nodes=nodes, panels=panels, subdomain_of_panel=np.ones(len(panels), int),
                boundary_edges=edges, h=h, h_min=h, node_side=np.ones(len(nodes), int),
                screen=screen)


def decompose(screen: Screen, split_x: float, n1: int, n2: int) -> tuple[Mesh, Decomposition]:
    """Split the screen at ``x = split_x`` and mesh each side independently.

    Side ``i`` gets ``n_i`` panel rows along the interface and as many columns
    as make its panels closest to square.  Panels are exact squares whenever
    the side width is a multiple of ``height / n_i``; otherwise they are
    rectangles and ``h``/``h_min`` refer to the longest/shortest panel side.
    """
    (a, b), (c, d) = screen.x_range, screen.y_range
    tol = 1e-12 * screen.width
    if not (a + tol < split_x < b - tol):
        raise ValueError(f"split_x={split_x} must lie strictly inside {screen.x_range}")
    for n in (n1, n2):
        if n < 1 or n > MAX_N:
            raise ValueError(f"panel counts must be in [1, {MAX_N}], got {n}")
    H = screen.height
    sides = [(a, split_x, n1), (split_x, b, n2)]
    all_nodes, all_panels, sub, node_side = [], [], [], []
    boundary, interface = [], {}
    sizes = []
    offset = 0
    for s, (x0, x1, ny) in enumerate(sides, start=1):
        w = x1 - x0
        nx = max(1, int(np.floor(w * ny / H + 0.5)))
        nodes, panels = _grid(x0, x1, c, d, nx, ny, offset)
        sizes += [w / nx, H / ny]
        idx = lambda i, j: offset + j * (nx + 1) + i
        gamma_col = nx if s == 1 else 0
        gam = [idx(gamma_col, j) for j in range(ny + 1)]
        interface[s] = np.array([(gam[j], gam[j + 1]) for j in range(ny)])
        loop = _ring(nx, ny, offset)
        ring_edges = [(loop[k], loop[(k + 1) % len(loop)]) for k in range(len(loop))]
        gam_set = {frozenset(e) for e in interface[s]}
        boundary += [e for e in ring_edges if frozenset(e) not in gam_set]
        all_nodes.append(nodes)
        all_panels.append(panels)
        sub.append(np.full(len(panels), s))
        node_side.append(np.full(len(nodes), s))
        offset += len(nodes)
    nodes = np.vstack(all_nodes)
    mesh = Mesh(nodes=nodes, panels=np.vstack(all_panels), subdomain_of_panel=np.concatenate(sub),
                boundary_edges=np.array(boundary), interface_edges=interface,
                h=max(sizes), h_min=min(sizes), node_side=np.concatenate(node_side),
                screen=screen)
    ys = np.unique(np.round(np.concatenate([nodes[interface[s]].reshape(-1, 2)[:, 1]
                                            for s in (1, 2)]), 14))
    segs = np.stack([np.column_stack([np.full(len(ys) - 1, split_x), ys[:-1]]),
                     np.column_stack([np.full(len(ys) - 1, split_x), ys[1:]])], axis=1)
    tang = np.tile([0.0, 1.0], (len(segs), 1))
    return mesh, Decomposition(split_x=split_x, segments=segs, tangents=tang)


def boundary_decomposition(mesh: Mesh) -> Decomposition:
    """Coupling curve for weak imposition of the Dirichlet condition on the
    screen boundary: every boundary edge, oriented counterclockwise."""
    e = mesh.boundary_edges
    segs = np.stack([mesh.nodes[e[:, 0]], mesh.nodes[e[:, 1]]], axis=1)
    t = segs[:, 1] - segs[:, 0]
    t /= np.linalg.norm(t, axis=1)[:, None]
    return Decomposition(split_x=None, segments=segs, tangents=t)


@dataclass(frozen=True)
class MeshParams:
    n1: int
    n2: Optional[int] = None


def refine(params: MeshParams) -> MeshParams:
    """Next level of a convergence sequence: halve ``h`` on each subdomain."""
    n1 = 2 * params.n1
    n2 = None if params.n2 is None else 2 * params.n2
    if max(n1, n2 or 0) > MAX_N:
        raise OverflowError(f"refinement beyond n={MAX_N}")
    return MeshParams(n1, n2)


def levels(n0: int, count: int) -> list[int]:
    """``[n0, 2 n0, 4 n0, ...]`` with ``count`` entries."""
    if n0 < 1 or count < 1:
        raise ValueError("n0 and count must be positive")
    out = [n0]
    p = MeshParams(n0)
    for _ in range(count - 1):
        p = refine(p)
        out.append(p.n1)
    return out


def dump_mesh(mesh: Mesh, path) -> None:
    """Write ``node i x y`` and ``panel i a b c d s`` lines."""
    with open(path, "w") as fh:
        for i, (x, y) in enumerate(mesh.nodes):
            fh.write(f"node {i} {x:.17g} {y:.17g}\n")
        for i, (p, s) in enumerate(zip(mesh.panels, mesh.subdomain_of_panel)):
            fh.write(f"panel {i} {p[0]} {p[1]} {p[2]} {p[3]} {s}\n")
