"""Galerkin boundary elements for the hypersingular equation on a flat screen,
with conforming, Nitsche-coupled (two subdomains, non-matching grids) and
Nitsche weak-boundary discretizations."""
from .analysis import (ConvergenceRecord, EnergyExtrapolation, ExtrapolationError, SolveError,
                       error_e1, error_e2, extrapolate_energy, fit_rate, jump_l2, solve)
from .assembly import (LinearSystem, NitscheConfig, NuRule, SystemParts, assemble_parts,
                       assemble_system)
from .femspace import DofSpace, make_space
from .geometry import Decomposition, Mesh, Screen, build_uniform_mesh, decompose
from .study import LevelCache, RunConfig, reference_energy, run_convergence_study

__version__ = "0.1.0"

__all__ = [
    "ConvergenceRecord", "EnergyExtrapolation", "ExtrapolationError", "SolveError",
    "error_e1", "error_e2", "extrapolate_energy", "fit_rate", "jump_l2", "solve",
    "LinearSystem", "NitscheConfig", "NuRule", "SystemParts", "assemble_parts",
    "assemble_system", "DofSpace", "make_space", "Decomposition", "Mesh", "Screen",
    "build_uniform_mesh", "decompose", "LevelCache", "RunConfig", "reference_energy",
    "run_convergence_study",
]
