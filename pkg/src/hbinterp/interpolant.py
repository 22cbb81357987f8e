"""Hermite-Birkhoff interpolants on a patch.

The interpolant is

    H(u) = sum_i T_i(u) g_i(u),

where ``T_i`` is the incomplete Taylor expansion (in chart coordinates) of
the data stored at node ``z_i`` and ``g_i`` are cardinal basis functions,
either the global inverse-distance weights or their localized version.
Because the weights vanish to order ``k`` at every node, ``H`` reproduces
all prescribed derivatives.  Nothing is solved; building is linear in the
number of nodes.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from hbinterp.basis import (
    NeighborIndex,
    WeightConfig,
    inverse_weights,
    localized_weights,
    min_pair_distance,
)
from hbinterp.errors import (
    ConfigurationError,
    InconsistentDataError,
    InvalidIndexError,
    InvalidNodeSetError,
    StepTooLargeError,
    UncoveredPointError,
)
from hbinterp.geometry import Chart, geodesic_distance
from hbinterp.multiindex import (
    MultiIndexSet,
    completeness_order,
    global_order_k,
    monomial,
    multi_factorial,
    zero_index,
)
from hbinterp.testfunctions import central_difference

GLOBAL = "global"
LOCALIZED = "localized"


@dataclass(frozen=True, eq=False)
class HermiteNode:
    """A node ``z_i`` with derivative data ``{beta: D^beta f(z_i)}``.

    Derivatives are taken with respect to the chart coordinates.
    """

    point: np.ndarray
    delta_set: MultiIndexSet
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        values = {tuple(int(b) for b in k): float(v) for k, v in self.values.items()}
        if set(values) != set(self.delta_set):
            raise InconsistentDataError(
                f"node data keys {sorted(values)} differ from its multi-index set "
                f"{list(self.delta_set)}")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_data(cls, point, data, m=None):
        return cls(point, MultiIndexSet(list(data), m), data)

    @property
    def value(self):
        return self.values[zero_index(self.delta_set.m)]


def nodes_from_function(f, chart, points, delta_sets):
    """Hermite nodes carrying the exact chart partials of a test function."""
    points = np.asarray(points, dtype=float)
    if isinstance(delta_sets, MultiIndexSet):
        delta_sets = [delta_sets] * len(points)
    v = chart.forward(points)
    return [HermiteNode(p, ds, f.hermite_data(vi, ds))
            for p, vi, ds in zip(points, v, delta_sets)]


@dataclass
class ConditionReport:
    """Finite-difference residuals ``|D^beta H(z_i) - f_{i,beta}|``.

    ``rows`` holds ``(node, beta, approx, target, residual)`` tuples.
    """

    fd_step: float
    rows: list

    def max_residual(self, order=None):
        res = [r[4] for r in self.rows if order is None or sum(r[1]) == order]
        return max(res, default=0.0)

    @property
    def max_by_order(self):
        orders = sorted({sum(r[1]) for r in self.rows})
        return {o: self.max_residual(o) for o in orders}

    @property
    def value_rows(self):
        return [r for r in self.rows if sum(r[1]) == 0]

    @property
    def derivative_rows(self):
        return [r for r in self.rows if sum(r[1]) > 0]


class Interpolant:
    """Assembled Hermite-Birkhoff interpolant.

    Parameters
    ----------
    patch : Patch
        Interpolation domain.  A whole-sphere patch is accepted only for
        Lagrange data (every node set is ``{0}``).
    nodes : sequence of HermiteNode
    weights : WeightConfig, optional
        Unset ``mu`` / ``bump_exponent`` default to ``k + 1``.
    mode : {"global", "localized"}
        ``"localized"`` requires ``weights.delta``.
    chart : Chart, optional
        Defaults to the canonical chart of the patch.
    fallback_global : bool
        In localized mode, use the global weights at points with no node
        within ``delta`` instead of raising :class:`UncoveredPointError`.
    """

    def __init__(self, patch, nodes, weights=None, mode=GLOBAL, chart=None,
                 fallback_global=False):
        if mode not in (GLOBAL, LOCALIZED):
            raise ConfigurationError(f"mode must be 'global' or 'localized', got {mode!r}")
        nodes = tuple(nodes)
        if not nodes:
            raise InvalidNodeSetError("at least one node is required")
        self.patch = patch
        self.manifold = M = patch.manifold
        self.mode = mode
        self.fallback_global = bool(fallback_global)
        self.nodes = nodes
        self.m = M.dim

        for node in nodes:
            if node.delta_set.m != self.m:
                raise InvalidNodeSetError(
                    f"multi-index dimension {node.delta_set.m} does not match manifold "
                    f"dimension {self.m}")
        self.points = M.validate_points(np.array([node.point for node in nodes]))
        if not np.all(patch.contains(self.points)):
            bad = np.flatnonzero(~patch.contains(self.points)).tolist()
            raise InvalidNodeSetError(f"nodes {bad} lie outside the patch")

        self.k = global_order_k(node.delta_set for node in nodes)
        self.node_q = [completeness_order(node.delta_set) for node in nodes]
        self.q = min(self.node_q)
        self.weights = (weights or WeightConfig()).resolve(self.k)
        if mode == LOCALIZED and self.weights.delta is None:
            raise ConfigurationError("localized mode needs a localization radius delta")
        self.tol = self.weights.near_node_tol * patch.diameter

        self.index = NeighborIndex(self.points, M)  # also rejects duplicate nodes

        if patch.is_whole and self.k > 0:
            raise ConfigurationError(
                "derivative data need a single chart; use a patch with finite radius")
        if chart is None and not patch.is_whole:
            chart = Chart.for_patch(patch)
        self.chart = chart
        self.node_v = chart.forward(self.points) if chart is not None else None

        # coefficient table over the union of all multi-indices
        betas = sorted({b for node in nodes for b in node.delta_set},
                       key=lambda b: (sum(b), tuple(-c for c in b)))
        self._betas = betas
        self._coef = np.zeros((len(nodes), len(betas)))
        for i, node in enumerate(nodes):
            for j, b in enumerate(betas):
                if b in node.values:
                    self._coef[i, j] = node.values[b] / multi_factorial(b)
        self._values0 = self._coef[:, 0].copy()

    # ------------------------------------------------------------------
    @property
    def n(self):
        return len(self.nodes)

    @property
    def delta(self):
        return self.weights.delta

    def __repr__(self):
        return (f"Interpolant(n={self.n}, k={self.k}, q={self.q}, mode={self.mode!r}, "
                f"mu={self.weights.mu}, delta={self.weights.delta})")

    def _taylor(self, v, idx):
        """``T_i`` at chart point ``v`` for the nodes ``idx``."""
        if self.k == 0 or v is None:
            return self._values0[idx]
        diff = v - self.node_v[idx]
        out = self._coef[idx, 0].copy()
        for j in range(1, len(self._betas)):
            out += self._coef[idx, j] * monomial(diff, self._betas[j])
        return out

    def _weights(self, u, cand=None):
        """``(indices, weights)`` of the nonzero cardinal functions at ``u``."""
        w = self.weights
        if self.mode == LOCALIZED:
            if cand is None:
                cand = self.index.query(u, w.delta)
            if len(cand):
                d = geodesic_distance(self.manifold, u, self.points[cand])
                return cand, localized_weights(d, w.mu, w.delta, w.bump_exponent, self.tol)
            if not self.fallback_global:
                raise UncoveredPointError(point=np.asarray(u).tolist(), delta=w.delta)
        d = geodesic_distance(self.manifold, u, self.points)
        return np.arange(self.n), inverse_weights(d, w.mu, self.tol)

    def _evaluate_one(self, u, v, cand=None):
        idx, g = self._weights(u, cand)
        hit = np.flatnonzero(g == 1.0)
        if len(hit) and np.all(np.delete(g, hit[0]) == 0.0):
            i = idx[hit[0]]
            if np.array_equal(u, self.points[i]):
                return float(self._values0[i])
            return float(self._taylor(v, np.array([i]))[0])
        return float(np.dot(self._taylor(v, idx), g))

    def _prepare(self, points):
        pts = self.manifold.validate_points(points)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        v = self.chart.forward(pts) if self.chart is not None else [None] * len(pts)
        return pts, v, single

    # ------------------------------------------------------------------
    def evaluate(self, u):
        """``H(u)`` at a single point."""
        pts, v, _ = self._prepare(u)
        return self._evaluate_one(pts[0], v[0])

    __call__ = evaluate

    def evaluate_batch(self, points, workers=None, chunk_size=512):
        """``H`` at each of ``points``, in order.

        ``workers > 1`` evaluates chunks on a thread pool; results do not
        depend on the number of workers.  If some points are uncovered, a
        single :class:`UncoveredPointError` listing all of their indices is
        raised.
        """
        if len(points) == 0:
            return np.empty(0)
        pts, v, _ = self._prepare(points)
        chunks = [range(s, min(s + chunk_size, len(pts))) for s in range(0, len(pts), chunk_size)]

        def run(rng):
            cands = (self.index.query_many(pts[rng.start:rng.stop], self.weights.delta)
                     if self.mode == LOCALIZED else [None] * len(rng))
            out = np.empty(len(rng))
            bad = []
            for j, i in enumerate(rng):
                try:
                    out[j] = self._evaluate_one(pts[i], v[i], cands[j])
                except UncoveredPointError:
                    out[j] = np.nan
                    bad.append(i)
            return out, bad

        if workers and workers > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run, chunks))
        else:
            results = [run(c) for c in chunks]
        bad = [i for _, b in results for i in b]
        if bad:
            raise UncoveredPointError(delta=self.weights.delta, indices=bad,
                                      point=pts[bad[0]].tolist())
        return np.concatenate([r for r, _ in results])

    def basis_values(self, u):
        """Dense vector of all cardinal functions ``g_i(u)``."""
        pts, _, _ = self._prepare(u)
        idx, g = self._weights(pts[0])
        out = np.zeros(self.n)
        out[idx] = g
        return out

    def taylor_values(self, u):
        """All ``T_i(u)``, one per node."""
        pts, v, _ = self._prepare(u)
        return self._taylor(v[0], np.arange(self.n))

    def evaluate_basis(self, i, beta, u):
        """``g_{i,beta}(u) = (v(u) - v(z_i))**beta / beta! * g_i(u)``."""
        beta = tuple(beta)
        if beta not in self.nodes[i].delta_set:
            raise InvalidIndexError(f"multi-index {beta} is not in the set of node {i}")
        pts, v, _ = self._prepare(u)
        g = self.basis_values(pts[0])[i]
        if sum(beta) == 0:
            return float(g)
        mono = monomial(v[0] - self.node_v[i], beta)
        return float(mono / multi_factorial(beta) * g)

    def verify_conditions(self, fd_step):
        """Check ``D^beta H(z_i) = f_{i,beta}`` at every node.

        Values are checked directly; derivatives with second-order central
        differences in chart coordinates.
        """
        if fd_step <= 0:
            raise StepTooLargeError(f"fd_step must be > 0, got {fd_step}")
        if self.n > 1:
            sep = min_pair_distance(self.points, self.manifold)
            if fd_step >= 0.5 * sep:
                raise StepTooLargeError(
                    f"fd_step {fd_step} is not below half the minimum node separation {sep}")
        rows = []
        for i, node in enumerate(self.nodes):
            for beta in node.delta_set:
                target = node.values[beta]
                if sum(beta) == 0:
                    approx = self.evaluate(self.points[i])
                else:
                    approx = central_difference(
                        lambda vs: self.evaluate_batch(self.chart.inverse(vs)),
                        self.node_v[i], beta, fd_step)
                rows.append((i, beta, approx, target, abs(approx - target)))
        return ConditionReport(fd_step, rows)


def build(patch, nodes, weights=None, mode=GLOBAL, chart=None, fallback_global=False):
    """Validate the node set and weight configuration and assemble ``H``."""
    return Interpolant(patch, nodes, weights, mode, chart, fallback_global)
