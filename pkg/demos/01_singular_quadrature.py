"""
Singular panel-pair quadrature on the unit square.

The Galerkin matrix needs int_P int_Q g(x, y)/|x - y| for touching panels.
Here the production rules are compared with the closed-form self-energy of
the unit square and with a rule of much higher order, for each contact
class and for growing order.
"""
import numpy as np

from nitsche_bem.quadrature import classify_pair, pair_rule

UNIT = (0.0, 1.0, 0.0, 1.0)
SELF = 4 * np.log(1 + np.sqrt(2)) - 4 / 3 * (np.sqrt(2) - 1)


def kernel_integral(P, Q, order):
    r = pair_rule(P, Q, 5, order)
    return np.sum(r.weights / np.linalg.norm(r.x - r.y, axis=1)), len(r)


# coincident pair against the closed form
print("coincident unit panels, exact value %.15f" % SELF)
for q in range(2, 10):
    val, npts = kernel_integral(UNIT, UNIT, q)
    print("  order %d  points %6d  rel. error %.2e" % (q, npts, abs(val - SELF) / SELF))

# the other classes against order 12
for Q in [(1.0, 2.0, 0.0, 1.0), (1.0, 2.0, 1.0, 2.0), (1.0, 2.0, 0.3, 0.7)]:
    ref, _ = kernel_integral(UNIT, Q, 12)
    print("\n%s vs %s (%s)" % (UNIT, Q, classify_pair(UNIT, Q).name if Q[2] == 0 or Q[2] == 1
                               else "non-conforming, split first"))
    for q in (3, 4, 6, 8):
        val, npts = kernel_integral(UNIT, Q, q)
        print("  order %d  points %6d  rel. diff %.2e" % (q, npts, abs(val - ref) / ref))
