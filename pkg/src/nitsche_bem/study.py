"""Convergence studies for the screen problem ``W u = 1`` on the unit square.

A study runs one discretization over a sequence of uniformly refined meshes and
reports, per level, the energy ``<f, u_h>``, the two error measures and the
jump norm.  The error measures are normalized by ``||u||_ex``, obtained once
by Aitken extrapolation of conforming energies on the three finest levels of
the same mesh sequence.

CSV layout: ``# key=value`` header lines with the configuration, then
``level,h,h_min,ndofs,energy,e1,e2,jump_l2,nu,sigma,mode,seconds`` rows (and a
``ref_curve`` column with ``|log h| h^(1/2)`` when requested).  Floats are
written with ``%.12e``.
"""
from __future__ import annotations

import io
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .analysis import (ConvergenceRecord, EnergyExtrapolation, error_e1, error_e2,
                       extrapolate_energy, jump_l2, solve)
from .assembly import NuRule, SystemParts, assemble_parts
from .femspace import make_space
from .geometry import Screen, build_uniform_mesh, decompose, levels
from .quadrature import DEFAULT_REGULAR_ORDER, DEFAULT_SINGULAR_ORDER, EDGE_ORDER

COLUMNS = ("level", "h", "h_min", "ndofs", "energy", "e1", "e2", "jump_l2",
           "nu", "sigma", "mode", "seconds")
CLI_MODES = {"conforming": "conforming", "dd": "dd", "weak-boundary": "weak_boundary",
             "weak_boundary": "weak_boundary"}


@dataclass(frozen=True)
class RunConfig:
    mode: str = "weak_boundary"
    sigma: int = -1
    nu_rule: NuRule = field(default_factory=lambda: NuRule(2.0))
    n0: int = 4
    levels: int = 4
    split_x: float = 0.5
    n2_ratio: float = 1.0
    order_regular: int = DEFAULT_REGULAR_ORDER
    order_singular: int = DEFAULT_SINGULAR_ORDER
    order_edge: int = EDGE_ORDER
    out: Optional[str] = None
    emit_reference_curve: bool = False
    record_time: bool = False

    def validate(self) -> "RunConfig":
        mode = CLI_MODES.get(self.mode)
        if mode is None:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.sigma not in (-1, 1):
            raise ValueError(f"sigma must be -1 or 1, got {self.sigma}")
        if self.n0 < 1 or self.levels < 1:
            raise ValueError("n0 and levels must be positive")
        if mode == "dd" and not 0.0 < self.split_x < 1.0:
            raise ValueError(f"split_x={self.split_x} must lie in (0, 1)")
        if self.n2_ratio <= 0:
            raise ValueError("n2_ratio must be positive")
        for o in (self.order_regular, self.order_singular, self.order_edge):
            if o < 1:
                raise ValueError("quadrature orders must be positive")
        levels(self.n0, self.levels)
        return replace(self, mode=mode)

    def header(self) -> dict:
        return {
            "mode": self.mode, "sigma": self.sigma, "nu": str(self.nu_rule), "n0": self.n0,
            "levels": self.levels, "split_x": self.split_x, "n2_ratio": self.n2_ratio,
            "quad_regular": self.order_regular, "quad_singular": self.order_singular,
            "quad_edge": self.order_edge,
        }


class LevelCache:
    """Assembled parts per (mode, mesh, quadrature), shared between runs with
    different ``sigma``/``nu`` on the same mesh."""

    def __init__(self):
        self._parts: dict = {}

    def parts(self, mode, n, cfg: RunConfig) -> SystemParts:
        n2 = max(1, int(round(n * cfg.n2_ratio)))
        key = (mode, n, n2 if mode == "dd" else None, cfg.split_x if mode == "dd" else None,
               cfg.order_regular, cfg.order_singular, cfg.order_edge)
        hit = self._parts.get(key)
        if hit is None:
            screen = Screen()
            if mode == "dd":
                mesh, dec = decompose(screen, cfg.split_x, n, n2)
                space = make_space(mesh, "dd", dec)
            else:
                space = make_space(build_uniform_mesh(screen, n), mode)
            hit = assemble_parts(space, 1.0, cfg.order_regular, cfg.order_singular, cfg.order_edge)
            self._parts[key] = hit
        return hit


def conforming_energies(cfg: RunConfig, cache: LevelCache | None = None) -> list[float]:
    cache = cache or LevelCache()
    out = []
    for n in levels(cfg.n0, cfg.levels):
        parts = cache.parts("conforming", n, cfg)
        sysm = parts.combine()
        out.append(float(sysm.b @ solve(sysm)))
    return out


def reference_energy(cfg: RunConfig, cache: LevelCache | None = None) -> EnergyExtrapolation:
    """``||u||_ex^2`` from the three finest conforming levels of the sequence."""
    E = conforming_energies(cfg, cache)
    if len(E) < 3:
        raise ValueError("energy extrapolation needs at least three levels")
    return extrapolate_energy(*E[-3:])


def run_convergence_study(cfg: RunConfig, cache: LevelCache | None = None,
                          reference: EnergyExtrapolation | None = None) -> list[ConvergenceRecord]:
    """Run ``cfg`` over its mesh sequence; write the CSV if ``cfg.out`` is set."""
    cfg = cfg.validate()
    cache = cache or LevelCache()
    ref = reference or reference_energy(cfg, cache)
    records = []
    for level, n in enumerate(levels(cfg.n0, cfg.levels)):
        t0 = time.perf_counter()
        parts = cache.parts(cfg.mode, n, cfg)
        space = parts.space
        nu = cfg.nu_rule(space.mesh.h_min) if cfg.mode != "conforming" else 0.0
        system = parts.combine(cfg.sigma, nu) if cfg.mode != "conforming" else parts.combine()
        u = solve(system)
        energy = float(system.b @ u)
        jl2 = jump_l2(space, u, cfg.order_edge)
        seconds = time.perf_counter() - t0 if cfg.record_time else 0.0
        records.append(ConvergenceRecord(
            level=level, h=space.mesh.h, h_min=space.mesh.h_min, ndofs=space.n_dofs,
            energy=energy, e1=error_e1(energy, ref.limit), e2=error_e2(jl2, ref.norm),
            jump_l2=jl2, nu=nu, sigma=cfg.sigma if cfg.mode != "conforming" else 0,
            mode=cfg.mode, seconds=seconds))
    if cfg.out:
        write_csv(cfg.out, records, cfg, ref)
    return records


def reference_curve(h) -> np.ndarray:
    """``|log h| h^(1/2)``."""
    h = np.asarray(h, float)
    return np.abs(np.log(h)) * np.sqrt(h)


def format_csv(records, cfg: RunConfig | None = None, ref: EnergyExtrapolation | None = None) -> str:
    buf = io.StringIO()
    header = dict(cfg.header()) if cfg is not None else {}
    if ref is not None:
        header["energy_ex"] = f"{ref.limit:.12e}"
        header["aitken_q"] = f"{ref.q:.12e}"
    for k, v in header.items():
        buf.write(f"# {k}={v}\n")
    ref_col = cfg is not None and cfg.emit_reference_curve
    cols = list(COLUMNS) + (["ref_curve"] if ref_col else [])
    buf.write(",".join(cols) + "\n")
    for r in records:
        row = [str(r.level), f"{r.h:.12e}", f"{r.h_min:.12e}", str(r.ndofs), f"{r.energy:.12e}",
               f"{r.e1:.12e}", f"{r.e2:.12e}", f"{r.jump_l2:.12e}", f"{r.nu:.12e}",
               str(r.sigma), r.mode, f"{r.seconds:.12e}"]
        if ref_col:
            row.append(f"{float(reference_curve(r.h)):.12e}")
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def write_csv(path, records, cfg: RunConfig | None = None, ref: EnergyExtrapolation | None = None):
    Path(path).write_text(format_csv(records, cfg, ref))


def read_csv(path) -> tuple[dict, list[ConvergenceRecord]]:
    """Inverse of :func:`write_csv`: ``(header, records)``."""
    header, records = {}, []
    lines = Path(path).read_text().splitlines()
    cols = None
    for line in lines:
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            header[k] = v
            continue
        if cols is None:
            cols = line.split(",")
            continue
        vals = dict(zip(cols, line.split(",")))
        records.append(ConvergenceRecord(
            level=int(vals["level"]), h=float(vals["h"]), h_min=float(vals["h_min"]),
            ndofs=int(vals["ndofs"]), energy=float(vals["energy"]), e1=float(vals["e1"]),
            e2=float(vals["e2"]), jump_l2=float(vals["jump_l2"]), nu=float(vals["nu"]),
            sigma=int(vals["sigma"]), mode=vals["mode"], seconds=float(vals["seconds"])))
    return header, records


def emit_figure_data(studies: dict, out_dir=None, which=("e1", "e2")) -> dict:
    """Per-figure error-versus-dimension series.

    ``studies`` maps a series label (for instance ``"nu=2"``) to its records.
    Returns ``{measure: {label: (ndofs, errors)}}`` and, with ``out_dir``, writes
    one ``<measure>.dat`` file per measure with blank-line separated blocks
    headed ``# <label>``.
    """
    if not studies:
        raise ValueError("no studies to emit")
    out = {}
    for m in which:
        series = {}
        for label, recs in studies.items():
            if not recs:
                raise ValueError(f"series {label!r} is empty")
            series[label] = (np.array([r.ndofs for r in recs]), np.array([getattr(r, m) for r in recs]))
        out[m] = series
    if out_dir is not None:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        for m, series in out.items():
            with open(d / f"{m}.dat", "w") as fh:
                for label, (nd, err) in series.items():
                    fh.write(f"# {label}\n")
                    for a, b in zip(nd, err):
                        fh.write(f"{a:d} {b:.12e}\n")
                    fh.write("\n")
    return out
