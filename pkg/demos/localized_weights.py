"""
Global versus localized weights
===============================

Global weights involve every node.  Multiplying them by the bump
(1 - d/delta)_+**s confines each weight to a geodesic ball, so evaluation
only touches the nodes a k-d tree range query returns.
"""

import time

import numpy as np

from hbinterp import (Chart, Interpolant, Manifold, MultiIndexSet, Patch, WeightConfig,
                      builtin, fill_distance, nodes_from_function, sample_patch)

torus = Manifold.torus([2 * np.pi, 2 * np.pi])
patch = Patch(torus, [0.5, 0.5], 2.5)
chart = Chart.for_patch(patch)
f = builtin("trig-product", 2)

points = sample_patch(patch, 3000, seed=0)
nodes = nodes_from_function(f, chart, points, MultiIndexSet.complete(2, 1))
h = fill_distance(points, sample_patch(patch, 100 * len(points), seed=1), torus)
print(f"{len(points)} nodes, fill distance {h:.4f}")

###############################################################################
# The same data with both weight families.  The patch wraps across the
# periodic boundary, which the chart unwraps.
test = sample_patch(patch, 2000, "uniform", seed=2)
exact = f(chart.forward(test))
for mode, w in (("global", WeightConfig()), ("localized", WeightConfig(delta=2 * h))):
    H = Interpolant(patch, nodes, w, mode=mode)
    t0 = time.perf_counter()
    err = np.abs(H.evaluate_batch(test) - exact).max()
    print(f"{mode:9s} max error {err:.3e} in {time.perf_counter() - t0:.2f}s")

###############################################################################
# Each localized weight vanishes outside its ball.
H = Interpolant(patch, nodes, WeightConfig(delta=2 * h), mode="localized")
g = H.basis_values(test[0])
print(f"{np.count_nonzero(g)} of {len(g)} weights are nonzero at a random point")
