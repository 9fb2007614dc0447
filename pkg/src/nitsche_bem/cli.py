"""Command line driver: one convergence study, CSV to ``--out`` or stdout.

Example::

    nitsche-bem --mode weak-boundary --sigma -1 --nu const:2 --n0 4 --levels 4
"""
from __future__ import annotations

import argparse
import sys

from .analysis import ExtrapolationError, SolveError, fit_rate
from .assembly import NuRule
from .quadrature import DEFAULT_REGULAR_ORDER, DEFAULT_SINGULAR_ORDER
from .study import CLI_MODES, LevelCache, RunConfig, format_csv, reference_energy, run_convergence_study


def _nu(text):
    try:
        return NuRule.parse(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nitsche-bem", description=__doc__.splitlines()[0])
    p.add_argument("--mode", choices=["conforming", "dd", "weak-boundary"], default="weak-boundary")
    p.add_argument("--sigma", type=int, choices=[-1, 1], default=-1)
    p.add_argument("--nu", type=_nu, default=NuRule(2.0),
                   help="penalty rule: const:<c>, logpow:<p>:<c> (c |log h_min|^p) or a number")
    p.add_argument("--n0", type=int, default=4, help="panels per side on the coarsest level")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--split-x", type=float, default=0.5, help="interface abscissa (dd mode)")
    p.add_argument("--n2-ratio", type=float, default=1.0,
                   help="side-2 panels per side relative to side 1 (dd mode), e.g. 1.5")
    p.add_argument("--quad-regular", type=int, default=DEFAULT_REGULAR_ORDER)
    p.add_argument("--quad-singular", type=int, default=DEFAULT_SINGULAR_ORDER)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.add_argument("--emit-reference-curve", action="store_true",
                   help="add a ref_curve column |log h| h^(1/2)")
    p.add_argument("--timing", action="store_true",
                   help="record wall time per level (output is then not reproducible)")
    p.add_argument("--rates", action="store_true", help="print fitted slopes to stderr")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        mode=CLI_MODES[args.mode], sigma=args.sigma, nu_rule=args.nu, n0=args.n0,
        levels=args.levels, split_x=args.split_x, n2_ratio=args.n2_ratio,
        order_regular=args.quad_regular, order_singular=args.quad_singular, out=args.out,
        emit_reference_curve=args.emit_reference_curve, record_time=args.timing)
    try:
        cfg = cfg.validate()
        cache = LevelCache()
        # the reference energy always comes from conforming runs on single-domain meshes
        ref = reference_energy(cfg, cache)
        records = run_convergence_study(cfg, cache, ref)
    except (ValueError, OverflowError, SolveError, ExtrapolationError) as err:
        print(f"nitsche-bem: error: {err}", file=sys.stderr)
        return 2
    if cfg.out is None:
        sys.stdout.write(format_csv(records, cfg, ref))
    if args.rates and len(records) >= 2:
        for m in ("e1", "e2"):
            if all(getattr(r, m) > 0 for r in records):
                print(f"{m} slope (all levels): {fit_rate(records, m, None):.4f}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
