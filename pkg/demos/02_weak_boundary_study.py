"""
Weakly imposed boundary condition on the screen (0,1)^2 with f = 1.

Runs the conforming reference and the Nitsche weak-boundary discretization for
the parameter choices of the classic experiment (sigma = -1 with several
constant nu; sigma = 1 with nu = 1 and nu = |log h|^2) and writes the
error-versus-dimension series as plain text blocks under ``out/``.

Takes about half a minute at n = 4..32.  Pass a number to change the count of
levels, e.g. ``python 02_weak_boundary_study.py 5`` adds n = 64.
"""
import sys
from pathlib import Path

from nitsche_bem.analysis import fit_rate
from nitsche_bem.assembly import NuRule
from nitsche_bem.study import LevelCache, RunConfig, emit_figure_data, reference_energy, run_convergence_study

levels = int(sys.argv[1]) if len(sys.argv) > 1 else 4
out = Path(__file__).with_name("out")

cache = LevelCache()
base = RunConfig(mode="conforming", n0=4, levels=levels)
ref = reference_energy(base, cache)
print("extrapolated energy %.8f (q = %.3f)" % (ref.limit, ref.q))

runs = {"conforming": base}
for nu in (1.0, 2.0, 10.0):
    runs["sigma=-1 nu=%g" % nu] = RunConfig(mode="weak_boundary", sigma=-1, nu_rule=NuRule(nu),
                                             n0=4, levels=levels)
runs["sigma=1 nu=1"] = RunConfig(mode="weak_boundary", sigma=1, nu_rule=NuRule(1.0), n0=4, levels=levels)
runs["sigma=1 nu=|log h|^2"] = RunConfig(mode="weak_boundary", sigma=1, nu_rule=NuRule(1.0, 2),
                                         n0=4, levels=levels)

studies = {}
for label, cfg in runs.items():
    recs = run_convergence_study(cfg, cache, ref)
    studies[label] = recs
    e2 = "" if cfg.mode == "conforming" else "  e2 slope %.3f" % fit_rate(recs, "e2", last=None)
    print("%-22s e1 %s  e1 slope %.3f%s" % (label, " ".join("%.4f" % r.e1 for r in recs),
                                           fit_rate(recs, "e1", last=None), e2))

# the skew-symmetric e1 curves dip below the conforming curve where the
# energy crosses the extrapolated value, then return to the asymptotic rate
emit_figure_data(studies, out, which=("e1",))
emit_figure_data({k: v for k, v in studies.items() if k != "conforming"}, out / "l2", which=("e2",))
print("series written to", out)
