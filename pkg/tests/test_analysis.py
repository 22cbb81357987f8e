import numpy as np
import pytest

from hbinterp import (
    HermiteNode,
    Interpolant,
    Manifold,
    MultiIndexSet,
    Patch,
    builtin,
    check_bounds,
    convergence_study,
    error_norms,
    fill_distance,
    geodesic_distance,
    nodes_from_function,
    sample_patch,
    separation_distance,
)
from hbinterp.analysis import ConvergenceRecord, fit_order
from hbinterp.errors import ConfigurationError, OrderExceededError, ValidationError
from hbinterp.testfunctions import polynomial


def brute_fill(nodes, ref, M):
    return max(float(np.min(geodesic_distance(M, u, nodes))) for u in ref)


def brute_sep(nodes, M):
    n = len(nodes)
    return 0.5 * min(geodesic_distance(M, nodes[i], nodes[j])
                     for i in range(n) for j in range(i + 1, n))


def test_fill_distance_examples(cap, cap_nodes, sphere):
    assert fill_distance(cap_nodes, cap_nodes, sphere) == 0.0
    ref = sample_patch(cap, 20000, seed=1)
    assert fill_distance([[0, 0, 1.0]], ref, sphere) == pytest.approx(0.8, abs=0.01)
    ref = sample_patch(cap, 2000, "uniform", seed=2)
    assert fill_distance(cap_nodes, ref, sphere) == brute_fill(cap_nodes, ref, sphere)
    with pytest.raises(ValidationError):
        fill_distance(np.empty((0, 3)), ref, sphere)


@pytest.mark.parametrize("M, patch_args", [
    (Manifold.torus([2.0, 3.0]), ([0.3, 0.3], 0.7)),
    (Manifold.euclidean(3), ([0.0, 0.0, 0.0], 1.0)),
])
def test_fill_distance_brute_force_other_manifolds(M, patch_args):
    patch = Patch(M, *patch_args)
    nodes = sample_patch(patch, 80, "uniform", seed=3)
    ref = sample_patch(patch, 800, "uniform", seed=4)
    assert fill_distance(nodes, ref, M) == brute_fill(nodes, ref, M)
    assert separation_distance(nodes, M) == brute_sep(nodes, M)


def test_fill_distance_non_increasing_under_refinement(cap, sphere):
    ref = sample_patch(cap, 40000, seed=1)
    base = sample_patch(cap, 50, "uniform", seed=7)
    extra = sample_patch(cap, 400, "uniform", seed=8)
    hs = [fill_distance(np.vstack([base, extra[:k]]), ref, sphere) for k in (0, 50, 150, 400)]
    assert all(a >= b for a, b in zip(hs, hs[1:]))


def test_separation_examples(sphere):
    a = np.array([0, 0, 1.0])
    b = np.array([np.sin(0.4), 0, np.cos(0.4)])
    assert separation_distance([a, b], sphere) == pytest.approx(0.2, rel=1e-14)
    assert separation_distance([a, b, a], sphere) == 0.0
    with pytest.raises(ValidationError):
        separation_distance([a], sphere)
    rng = np.random.default_rng(5)
    x = rng.standard_normal((50, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    assert separation_distance(x, sphere) == brute_sep(x, sphere)


def test_error_norms(cap, cap_chart, cap_nodes):
    c = builtin("constant", 2, c=3.0)
    Hc = Interpolant(cap, nodes_from_function(c, cap_chart, cap_nodes, MultiIndexSet.complete(2, 0)))
    grid = sample_patch(cap, 500, "uniform", seed=1)
    mx, rms = error_norms(c, Hc, grid)
    assert mx <= 1e-14 and rms <= 1e-14

    f = builtin("gaussian", 2, c=2.0)
    H = Interpolant(cap, nodes_from_function(f, cap_chart, cap_nodes, MultiIndexSet.complete(2, 1)))
    assert error_norms(f, H, cap_nodes) == (0.0, 0.0)
    err = [abs(f(cap_chart.forward(u)) - H(u)) for u in grid]
    mx, rms = error_norms(f, H, grid, workers=3)
    assert mx == max(err)
    assert rms == pytest.approx(np.sqrt(np.mean(np.square(err))), rel=1e-14)


def test_check_bounds(cap, cap_chart, cap_nodes):
    c = builtin("constant", 2, c=-2.0)
    Hc = Interpolant(cap, nodes_from_function(c, cap_chart, cap_nodes, MultiIndexSet.complete(2, 2)))
    assert check_bounds(c, Hc, sample_patch(cap, 200, "uniform", seed=1)).ok

    f = builtin("trig-product", 2)
    sets = [MultiIndexSet.lagrange(2), MultiIndexSet.complete(2, 1),
            MultiIndexSet([(0, 0), (1, 0), (0, 2)], 2)]
    nodes = nodes_from_function(f, cap_chart, cap_nodes, [sets[i % 3] for i in range(100)])
    H = Interpolant(cap, nodes)
    assert check_bounds(f, H, cap_nodes).ok
    rep = check_bounds(f, H, sample_patch(cap, 1000, "uniform", seed=2))
    assert rep.ok and rep.n_points == 1000


def test_fit_order_exact_power_law():
    recs = [ConvergenceRecord(j, 0, 2.0 ** -j, 3 * 2.0 ** (-2 * j), 0.0) for j in range(5)]
    fit = fit_order(recs)
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.levels_used == (1, 2, 3, 4)


def test_convergence_polynomial_skipped(cap):
    p = polynomial(2, {(0, 0): 1.0, (1, 0): 0.5, (1, 1): -2.0, (0, 2): 0.3})
    res = convergence_study(p, cap, 2, levels=3, n0=30, n_eval=300)
    assert res.fit is None and "degree" in res.skip_reason
    assert all(r.max_error <= 1e-10 for r in res.records)


def test_convergence_deterministic_and_monotone_h(cap):
    f = builtin("gaussian", 2)
    a = convergence_study(f, cap, 1, levels=3, n0=30, n_eval=300, seed=4)
    b = convergence_study(f, cap, 1, levels=3, n0=30, n_eval=300, seed=4, workers=3)
    assert a.records == b.records
    hs = [r.h for r in a.records]
    assert all(x > y for x, y in zip(hs, hs[1:]))
    assert all(r.max_error >= r.rms_error >= 0 for r in a.records)


def test_convergence_gaussian_q0(cap):
    res = convergence_study(builtin("gaussian", 2), cap, 0, levels=4)
    assert 0.7 <= res.fit.slope <= 1.6


def test_convergence_validation(cap):
    f = builtin("gaussian", 2)
    with pytest.raises(ConfigurationError, match="3 levels"):
        convergence_study(f, cap, 0, levels=2)
    with pytest.raises(ConfigurationError):
        convergence_study(f, cap, 0, K=0.5)
    with pytest.raises(OrderExceededError):
        convergence_study(f, cap, 9)
