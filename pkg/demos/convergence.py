"""
Convergence under node refinement
=================================

With complete Taylor data of order q at every node and localized weights
of radius delta = K h, the max error should fall like h**(q + 1), where h
is the fill distance.
"""

from hbinterp import Manifold, Patch, builtin, convergence_study

cap = Patch(Manifold.sphere(1.0), [0.0, 0.0, 1.0], 0.8)
f = builtin("trig-product", 2)

###############################################################################
# Four levels of 50, 200, 800 and 3200 nodes per order.  The fitted slope
# ignores the coarsest level.
for q in (0, 1, 2):
    res = convergence_study(f, cap, q, levels=4, K=2.0, seed=0)
    for r in res.records:
        print(f"  q={q} n={r.n_nodes:5d} h={r.h:.4f} max={r.max_error:.3e}")
    print(f"q={q}: slope {res.fit.slope:.2f} (r^2 {res.fit.r_squared:.4f}), expected {q + 1}")

###############################################################################
# Polynomials of degree <= q are reproduced exactly, so no slope is fitted.
res = convergence_study(builtin("quadratic", 2), cap, 2, levels=3)
print(res.skip_reason)
