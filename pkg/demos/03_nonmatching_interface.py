"""
Two subdomains with non-matching grids coupled by Nitsche's method.

The screen is split at x = 1/2; side 1 carries n rows of panels and side 2
3n/2 rows, so the interface nodes do not match.  We look at the smallest
eigenvalue of the symmetric part (discrete ellipticity), at the interface jump
of the solution and at the energy, for both choices of sigma.
"""
import numpy as np

from nitsche_bem import NuRule, Screen, assemble_parts, decompose, make_space, solve
from nitsche_bem.analysis import jump_l2

for n in (2, 4, 8):
    mesh, dec = decompose(Screen(), 0.5, n, 3 * n // 2)
    parts = assemble_parts(make_space(mesh, "dd", dec))
    print("n1=%d n2=%d  dofs %d  gamma pieces %d" % (n, 3 * n // 2, parts.space.n_dofs, len(dec.segments)))
    for sigma, rule in ((-1, NuRule(0.1)), (-1, NuRule(10.0)), (1, NuRule(1.0, 3))):
        nu = rule(mesh.h_min)
        sysm = parts.combine(sigma, nu)
        lam = np.linalg.eigvalsh(0.5 * (sysm.A + sysm.A.T)).min()
        u = solve(sysm)
        print("   sigma=%+d nu=%7.3f  min eig %.3e  energy %.6f  jump %.2e"
              % (sigma, nu, lam, sysm.b @ u, jump_l2(parts.space, u)))

# large penalties push the matching-grid solution onto the continuous space
mesh, dec = decompose(Screen(), 0.375, 8, 8)
parts = assemble_parts(make_space(mesh, "dd", dec))
print("\nmatching n=8, split at 3/8, sigma=-1")
for nu in (1e0, 1e2, 1e4, 1e6):
    sysm = parts.combine(-1, nu)
    u = solve(sysm)
    print("   nu=%.0e  energy %.10f  jump %.2e" % (nu, sysm.b @ u, jump_l2(parts.space, u)))
