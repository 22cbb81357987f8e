"""
Hermite interpolation on a spherical cap
========================================

Scattered nodes on a cap of the unit sphere carry values and first
derivatives of a smooth function.  The interpolant blends one local Taylor
polynomial per node with inverse geodesic-distance weights.
"""

import numpy as np

from hbinterp import (Chart, Interpolant, Manifold, MultiIndexSet, Patch, builtin,
                      nodes_from_function, sample_patch)

###############################################################################
# A cap of geodesic radius 0.8 around the north pole, with its
# stereographic chart.
sphere = Manifold.sphere(1.0)
cap = Patch(sphere, [0.0, 0.0, 1.0], 0.8)
chart = Chart.for_patch(cap)

###############################################################################
# 200 quasi-uniform nodes.  Each carries f, df/dv1 and df/dv2 of a Gaussian
# defined in chart coordinates.
f = builtin("gaussian", 2, c=1.5)
points = sample_patch(cap, 200, seed=0)
nodes = nodes_from_function(f, chart, points, MultiIndexSet.complete(2, 1))
H = Interpolant(cap, nodes)
print(H)

###############################################################################
# Compare with f on random points of the cap.
test = sample_patch(cap, 2000, "uniform", seed=1)
err = np.abs(H.evaluate_batch(test) - f(chart.forward(test)))
print(f"max error {err.max():.3e}, rms error {np.sqrt(np.mean(err ** 2)):.3e}")

###############################################################################
# The data are matched exactly at the nodes, and derivatives up to the
# finite-difference noise floor.
report = H.verify_conditions(1e-5)
print("largest residual by derivative order:", report.max_by_order)

###############################################################################
# Values alone give a larger error.  Global weights flatten H near every
# node, which caps the accuracy of both fits; localized weights (see
# localized_weights.py) remove most of that error.
lagrange = nodes_from_function(f, chart, points, MultiIndexSet.lagrange(2))
err0 = np.abs(Interpolant(cap, lagrange).evaluate_batch(test) - f(chart.forward(test)))
print(f"values only: max error {err0.max():.3e}")
