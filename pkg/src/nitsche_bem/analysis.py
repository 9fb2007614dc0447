"""Solving, energy extrapolation and the computable error measures."""
from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from .assembly import LinearSystem
from .femspace import DofSpace
from .quadrature import EDGE_ORDER


class SolveError(RuntimeError):
    """Raised for numerically singular systems; carries the condition estimate."""

    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (condition estimate {condition:.3e})")
        self.condition = condition


class ExtrapolationError(ValueError):
    pass


@dataclass
class ConvergenceRecord:
    level: int
    h: float
    h_min: float
    ndofs: int
    energy: float
    e1: float
    e2: float
    jump_l2: float
    nu: float
    sigma: int
    mode: str
    seconds: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class EnergyExtrapolation:
    energies: tuple[float, float, float]
    limit: float
    q: float

    @property
    def norm(self) -> float:
        """``||u||_ex``, the square root of the extrapolated energy."""
        return float(np.sqrt(self.limit))


def solve(system: LinearSystem, symmetric: bool | None = None) -> np.ndarray:
    """Dense direct solve.

    Uses LU with partial pivoting; when ``symmetric`` is true (default: the
    matrix is symmetric to round-off) the symmetric indefinite ``LDL^T``
    factorization is used instead.  Raises :class:`SolveError` if a pivot
    falls below ``1e-14`` times the matrix scale.
    """
    A = np.asarray(system.A, dtype=float)
    b = np.asarray(system.b, dtype=float)
    scale = np.abs(A).max()
    if scale == 0 or not np.all(np.isfinite(A)):
        raise SolveError("matrix is zero or not finite", np.inf)
    if symmetric is None:
        symmetric = bool(np.abs(A - A.T).max() <= 1e-10 * scale)
    if symmetric:
        lu, d, perm = scipy.linalg.ldl(A, lower=True)
        pivots = np.abs(np.linalg.eigvalsh(d)) if d.size else np.array([])
        small = pivots.min() if pivots.size else 0.0
        if small < 1e-14 * scale:
            raise SolveError("symmetric factorization broke down", _cond(A))
        x = scipy.linalg.solve(A, b, assume_a="sym")
    else:
        with warnings.catch_warnings():
            # singular pivots are reported below with the condition estimate
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
        if np.abs(np.diag(lu)).min() < 1e-14 * scale:
            raise SolveError("LU pivot below threshold", _cond(A))
        x = scipy.linalg.lu_solve((lu, piv), b)
    return x


def _cond(A):
    return float(np.linalg.cond(A))


def residual(system: LinearSystem, x) -> float:
    """``||A x - b|| / ||b||``."""
    r = system.A @ x - system.b
    return float(np.linalg.norm(r) / np.linalg.norm(system.b))


def extrapolate_energy(E1: float, E2: float, E3: float) -> EnergyExtrapolation:
    """Aitken delta-squared limit of three successive Galerkin energies.

    ``q = (E3 - E2)/(E2 - E1)`` and the limit is ``E3 + (E3 - E2) q/(1 - q)``.
    Requires ``E1 < E2 < E3`` and ``0 < q < 1``.
    """
    if not (E1 < E2 < E3):
        raise ExtrapolationError(f"energies must increase strictly, got {(E1, E2, E3)}")
    q = (E3 - E2) / (E2 - E1)
    if not (0.0 < q < 1.0):
        raise ExtrapolationError(f"contraction ratio q={q} is outside (0, 1)")
    limit = E3 + (E3 - E2) * q / (1.0 - q)
    return EnergyExtrapolation((E1, E2, E3), float(limit), float(q))


def error_e1(energy: float, energy_ex: float) -> float:
    """``| ||u||_ex^2 - <f, u_h> |^(1/2) / ||u||_ex`` (argument: ``||u||_ex^2``)."""
    return float(np.sqrt(abs(energy_ex - energy)) / np.sqrt(energy_ex))


def error_e2(jump_l2: float, norm_ex: float) -> float:
    """``||u_h||_{L2(gamma)}^(1/2) / ||u||_ex``, square root of the norm as
    in the error bound."""
    return float(np.sqrt(jump_l2) / norm_ex)


def jump_l2(space: DofSpace, coeffs, order: int = EDGE_ORDER) -> float:
    """``||[u_h]||_{L2(gamma)}``; the trace norm on the screen boundary in
    ``weak_boundary`` mode and zero for conforming spaces."""
    if space.mode == "conforming":
        return 0.0
    pts, w, _ = space.gamma_rule(order)
    J = space.trace_matrix(pts)
    v = J @ np.asarray(coeffs, float)
    return float(np.sqrt(np.dot(w, v * v)))


def fit_rate(records, which: str = "e1", last: int | None = 3) -> float:
    """Least-squares slope of ``log(error)`` against ``log(h)``.

    Uses the ``last`` finest levels (all levels if ``None``).  Errors must be
    positive; a vanishing measure (``e2`` of a conforming run) has no rate.
    """
    if which not in ("e1", "e2"):
        raise ValueError(f"unknown error measure {which!r}")
    recs = sorted(records, key=lambda r: -r.h)
    if last is not None:
        recs = recs[-last:]
    if len(recs) < 2:
        raise ValueError("at least two levels are needed to fit a rate")
    h = np.array([r.h for r in recs])
    e = np.array([getattr(r, which) for r in recs])
    if not np.all(e > 0):
        raise ValueError(f"{which} must be positive on every level to fit a rate")
    return slope(h, e)


def slope(h, e) -> float:
    """Least-squares slope of ``log e`` versus ``log h``."""
    x = np.log(np.asarray(h, float))
    y = np.log(np.asarray(e, float))
    return float(np.polyfit(x, y, 1)[0])
