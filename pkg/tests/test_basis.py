import numpy as np
import pytest

from hbinterp import (
    Manifold,
    Patch,
    WeightConfig,
    alpha_power,
    build_neighbor_index,
    bump,
    cbf_inverse,
    cbf_localized,
    cbf_product,
    geodesic_distance,
    sample_patch,
)
from hbinterp.errors import ConfigurationError, InvalidNodeSetError, UncoveredPointError

from conftest import random_sphere_points

LINE = Manifold.euclidean(1)


def test_alpha_power():
    assert alpha_power(0.0, 2.5) == 0.0
    assert alpha_power(1.0, 7.3) == 1.0
    assert alpha_power(0.5, 3) == 0.125


def test_bump():
    assert bump(1.0, 1.0, 3) == 0.0
    assert bump(2.0, 1.0, 3) == 0.0
    assert bump(0.0, 0.7, 3) == 1.0
    assert bump(0.5, 1.0, 2) == 0.25


def test_bump_smoothness_at_support_edge():
    # (1 - r)^s has s-1 vanishing derivatives at r = 1: one-sided differences shrink like h^(s-j)
    s, delta, h = 3, 1.0, 1e-3
    left = [bump(delta - j * h, delta, s) for j in range(4)]
    d1 = (left[0] - left[1]) / h
    d2 = (left[0] - 2 * left[1] + left[2]) / h ** 2
    assert abs(d1) < 10 * h and abs(d2) < 10 * h


def test_single_node_product_is_one():
    np.testing.assert_array_equal(cbf_product([0.3], [[0.0]], 2.0, LINE), [1.0])


def test_product_and_inverse_two_node_line():
    # 0.25^-2 / (0.25^-2 + 0.75^-2) = 16 / (16 + 16/9) = 0.9
    g_prod = cbf_product([0.25], [[0.0], [1.0]], 2.0, LINE)
    g_inv = cbf_inverse([0.25], [[0.0], [1.0]], 2.0, LINE)
    np.testing.assert_allclose(g_prod, [0.9, 0.1], rtol=1e-15)
    np.testing.assert_allclose(g_inv, [0.9, 0.1], rtol=1e-15)


def test_cardinality_at_nodes(cap_nodes, sphere):
    for j in (0, 17, 99):
        g = cbf_product(cap_nodes[j], cap_nodes[:20] if j < 20 else cap_nodes[80:], 3.0, sphere)
        assert np.count_nonzero(g) == 1 and g.max() == 1.0
        g = cbf_inverse(cap_nodes[j], cap_nodes, 3.0, sphere)
        np.testing.assert_array_equal(g, np.eye(100)[j])


def test_equidistant_is_half():
    np.testing.assert_array_equal(cbf_inverse([0.5], [[0.0], [1.0]], 3.0, LINE), [0.5, 0.5])


def test_near_node_short_circuit(cap_nodes, sphere):
    u = cap_nodes[3] + np.array([1e-14, 0.0, 0.0])
    u /= np.linalg.norm(u)
    assert 0 < geodesic_distance(sphere, u, cap_nodes[3]) < 1e-12
    g = cbf_inverse(u, cap_nodes, 3.0, sphere, tol=1e-12 * 1.6)
    np.testing.assert_array_equal(g, np.eye(100)[3])


def test_duplicate_nodes_rejected(sphere):
    pts = np.array([[0, 0, 1.0], [1.0, 0, 0], [0, 0, 1.0]])
    for fn in (cbf_product, cbf_inverse):
        with pytest.raises(InvalidNodeSetError):
            fn([0, 1.0, 0], pts, 2.0, sphere)
    with pytest.raises(InvalidNodeSetError):
        build_neighbor_index(pts, sphere)


def test_product_matches_inverse(cap, sphere, rng):
    # dividing numerator and denominator of the product form by prod_j d_j^mu gives the inverse form
    for n in (2, 5, 12, 20):
        nodes = sample_patch(cap, n, "uniform", seed=n)
        pts = sample_patch(cap, 100, "uniform", seed=100 + n)
        for u in pts:
            a = cbf_product(u, nodes, 3.0, sphere)
            b = cbf_inverse(u, nodes, 3.0, sphere)
            np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-300)


@pytest.mark.parametrize("mode", ["inverse", "localized"])
def test_partition_of_unity_and_nonnegativity(cap, cap_nodes, sphere, mode):
    index = build_neighbor_index(cap_nodes, sphere)
    pts = sample_patch(cap, 1000, "uniform", seed=7)
    for u in pts:
        if mode == "inverse":
            g = cbf_inverse(u, cap_nodes, 3.0, sphere)
        else:
            _, g = cbf_localized(u, cap_nodes, 3.0, 0.4, 3, index)
        assert np.all(g >= 0.0)
        assert abs(g.sum() - 1.0) <= 1e-12


def test_localized_examples(sphere):
    nodes = np.array([[0, 0, 1.0], [1.0, 0, 0], [0, 1.0, 0]])
    index = build_neighbor_index(nodes, sphere)
    u = np.array([0.1, 0.0, 1.0]) / np.hypot(0.1, 1.0)
    idx, g = cbf_localized(u, nodes, 2.0, 0.5, 3, index)
    assert idx.tolist() == [0] and g.tolist() == [1.0]
    idx, g = cbf_localized(nodes[2], nodes, 2.0, 2.0, 3, index)
    assert g[idx.tolist().index(2)] == 1.0 and g.sum() == 1.0
    with pytest.raises(UncoveredPointError) as exc:
        cbf_localized(-nodes[0], nodes, 2.0, 0.5, 3, index)
    assert exc.value.delta == 0.5


def test_localized_support_inside_delta_ball(cap, cap_nodes, sphere):
    index = build_neighbor_index(cap_nodes, sphere)
    delta = 0.25
    for u in sample_patch(cap, 300, "uniform", seed=8):
        idx, g = cbf_localized(u, cap_nodes, 3.0, delta, 3, index)
        d = geodesic_distance(sphere, u, cap_nodes)
        assert set(idx[g > 0]) <= set(np.flatnonzero(d < delta))


@pytest.mark.parametrize("M, make", [
    (Manifold.sphere(1.0), lambda rng, n: random_sphere_points(rng, n)),
    (Manifold.sphere(5.0), lambda rng, n: random_sphere_points(rng, n, 5.0)),
    (Manifold.torus([1.0, 2.0]), lambda rng, n: rng.uniform(0, 1, (n, 2)) * [1.0, 2.0]),
    (Manifold.euclidean(3), lambda rng, n: rng.standard_normal((n, 3))),
])
def test_range_queries_match_brute_force(M, make, rng):
    nodes = make(rng, 200)
    queries = make(rng, 50)
    index = build_neighbor_index(nodes, M)
    for u in queries:
        for delta in rng.uniform(0.05, 2.5, 3):
            d = geodesic_distance(M, u, nodes)
            np.testing.assert_array_equal(index.query(u, delta), np.flatnonzero(d < delta))
    many = index.query_many(queries, 0.7)
    for u, hit in zip(queries, many):
        np.testing.assert_array_equal(hit, index.query(u, 0.7))


def test_range_query_edge_radii(cap, cap_nodes, sphere):
    index = build_neighbor_index(cap_nodes, sphere)
    u = sample_patch(cap, 1, "uniform", seed=3)[0]
    assert len(index.query(u, 0.0)) == 0
    assert len(index.query(u, 2 * cap.diameter)) == len(cap_nodes)


def test_weight_config_validation():
    assert WeightConfig().resolve(2).mu == 3.0
    assert WeightConfig().resolve(2).bump_exponent == 3
    with pytest.raises(ConfigurationError, match="mu > k"):
        WeightConfig(mu=2.0).resolve(2)
    with pytest.raises(ConfigurationError):
        WeightConfig(bump_exponent=1).resolve(1)
    with pytest.raises(ConfigurationError):
        WeightConfig(delta=-1.0).resolve(0)
    with pytest.raises(ConfigurationError):
        WeightConfig(near_node_tol=1e-6).resolve(0)


def test_derivatives_of_weights_vanish_at_nodes(cap, cap_chart, sphere):
    # k = 2, mu = 3: central differences of g_i at every node shrink with the step
    from hbinterp.testfunctions import central_difference
    from hbinterp.multiindex import indices_up_to

    nodes = sample_patch(cap, 30, seed=2)
    V = cap_chart.forward(nodes)
    tol = 1e-12 * cap.diameter

    def fd_max(h):
        out = {1: 0.0, 2: 0.0}
        for j in range(len(nodes)):
            for i in (j, (j + 1) % len(nodes), (j + 7) % len(nodes)):
                g = lambda vs: np.array(
                    [cbf_inverse(u, nodes, 3.0, sphere, tol)[i] for u in cap_chart.inverse(vs)])
                for beta in indices_up_to(2, 2)[1:]:
                    o = sum(beta)
                    out[o] = max(out[o], abs(central_difference(g, V[j], beta, h)))
        return out

    a, b = fd_max(1e-4), fd_max(5e-5)
    assert 1.5 <= a[2] / b[2] <= 4.5
    assert a[1] / b[1] >= 1.5


def test_batch_weights_match_single(cap, cap_nodes, sphere):
    pts = np.vstack([sample_patch(cap, 50, "uniform", seed=11), cap_nodes[:3]])
    for fn, nodes in ((cbf_inverse, cap_nodes), (cbf_product, cap_nodes[:15])):
        batch = fn(pts, nodes, 3.0, sphere)
        assert batch.shape == (53, len(nodes))
        for u, row in zip(pts, batch):
            np.testing.assert_array_equal(row, fn(u, nodes, 3.0, sphere))
