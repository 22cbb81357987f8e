"""Fill distance, error norms, bound checks and convergence studies."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from hbinterp.basis import WeightConfig, _make_tree, min_pair_distance
from hbinterp.errors import ConfigurationError, OrderExceededError, UncoveredPointError, ValidationError
from hbinterp.geometry import Chart, chart_lipschitz, geodesic_distance, sample_patch
from hbinterp.interpolant import LOCALIZED, Interpolant, nodes_from_function
from hbinterp.multiindex import MultiIndexSet

log = logging.getLogger(__name__)


def nearest_distances(nodes, points, manifold):
    """Geodesic distance from each of ``points`` to its nearest node."""
    nodes = np.asarray(nodes, dtype=float)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    k = min(4, len(nodes))
    _, idx = _make_tree(nodes, manifold).query(points, k=k)
    idx = idx.reshape(len(points), k)
    # chord order equals geodesic order; the extra candidates guard near-ties
    d = geodesic_distance(manifold, points[:, None, :], nodes[idx])
    return d.min(axis=1)


def fill_distance(nodes, reference, manifold):
    """``max_{u in reference} min_i d_g(u, z_i)``.

    A discrete lower bound of the fill distance of the patch sampled by
    ``reference``; it converges to the supremum as the sample is refined.
    """
    nodes = np.asarray(nodes, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if len(nodes) == 0 or len(reference) == 0:
        raise ValidationError("fill_distance needs nonempty node and reference sets")
    return float(np.max(nearest_distances(nodes, reference, manifold)))


def separation_distance(nodes, manifold):
    """Half the smallest pairwise geodesic distance."""
    nodes = np.asarray(nodes, dtype=float)
    if len(nodes) < 2:
        raise ValidationError("separation distance needs at least two nodes")
    return 0.5 * min_pair_distance(nodes, manifold)


def error_norms(f, H, grid, workers=None):
    """``(max, rms)`` of ``|f(u) - H(u)|`` over ``grid``."""
    grid = H.manifold.validate_points(grid)
    approx = H.evaluate_batch(grid, workers=workers)
    err = np.abs(f(H.chart.forward(grid)) - approx)
    return float(np.max(err)), float(np.sqrt(np.mean(err * err)))


@dataclass
class BoundsReport:
    """Violations of ``|H| <= max_i |T_i|`` (a) and of
    ``|f - H| <= sum_i g_i |f - T_i| <= max_i |f - T_i|`` (b).

    Each violation is ``(point index, left side, right side)``.
    """

    n_points: int
    slack: float
    violations_a: list = field(default_factory=list)
    violations_b: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations_a and not self.violations_b


def check_bounds(f, H, points, slack=1e-12):
    points = H.manifold.validate_points(points)
    v = H.chart.forward(points)
    fv = f(v)
    report = BoundsReport(len(points), slack)
    for j, u in enumerate(points):
        T = H.taylor_values(u)
        g = H.basis_values(u)
        h = H.evaluate(u)
        a_rhs = float(np.max(np.abs(T)))
        if abs(h) > a_rhs + slack:
            report.violations_a.append((j, abs(h), a_rhs))
        local = np.abs(fv[j] - T)
        lhs = abs(fv[j] - h)
        weighted = float(np.dot(g, local))
        worst = float(np.max(local))
        if lhs > weighted + slack or weighted > worst + slack:
            report.violations_b.append((j, lhs, min(weighted, worst)))
    return report


@dataclass(frozen=True)
class ConvergenceRecord:
    level: int
    n_nodes: int
    h: float
    max_error: float
    rms_error: float


@dataclass(frozen=True)
class OrderFit:
    """Least-squares line through ``(log h, log max_error)``."""

    slope: float
    intercept: float
    r_squared: float
    levels_used: tuple = ()


@dataclass
class ConvergenceResult:
    records: list
    fit: Optional[OrderFit]
    skip_reason: Optional[str]
    q: int
    K: float
    chart_lipschitz: float
    params: dict = field(default_factory=dict)


def fit_order(records, drop_coarsest=True):
    used = records[1:] if drop_coarsest else records
    x = np.log([r.h for r in used])
    y = np.log([r.max_error for r in used])
    res = stats.linregress(x, y)
    return OrderFit(float(res.slope), float(res.intercept), float(res.rvalue ** 2),
                    tuple(r.level for r in used))


def convergence_study(f, patch, q, levels=4, seed=0, K=2.0, n0=50, ref_factor=100,
                      n_eval=2000, mu=None, workers=None):
    """Empirical convergence of the localized interpolant.

    Level ``j`` uses ``n0 * 2**(m j)`` quasi-uniform nodes (``n0 * 4**j`` on
    surfaces) carrying all partials of ``f`` up to order ``q``, the
    localization radius ``delta = K h`` with ``h`` the fill distance against
    a reference sample ``ref_factor`` times denser, and reports the max and
    rms error on ``n_eval`` random points.  The order is fitted on every
    level but the coarsest.

    Returns
    -------
    ConvergenceResult
        ``fit`` is None (with ``skip_reason``) when the errors are at
        rounding level, e.g. for polynomials of degree ``<= q``.
    """
    if levels < 3:
        raise ConfigurationError(f"a convergence study needs at least 3 levels, got {levels}")
    if K < 1:
        raise ConfigurationError(f"K must be >= 1, got {K}")
    if q < 0 or q > f.max_order:
        raise OrderExceededError(
            f"q = {q} exceeds the derivative order available for {f.name} ({f.max_order})")
    M = patch.manifold
    chart = Chart.for_patch(patch)
    delta_set = MultiIndexSet.complete(M.dim, q)
    rng = np.random.default_rng(seed)
    grid = sample_patch(patch, n_eval, "uniform", seed=int(rng.integers(2 ** 31)))
    f_grid = f(chart.forward(grid))

    records = []
    for j in range(levels):
        n = n0 * 2 ** (M.dim * j)
        pts = sample_patch(patch, n, "quasi-uniform", seed=seed)
        ref = sample_patch(patch, ref_factor * n, "quasi-uniform", seed=seed + 1)
        h = fill_distance(pts, ref, M)
        nodes = nodes_from_function(f, chart, pts, delta_set)
        H = Interpolant(patch, nodes, WeightConfig(mu=mu, delta=K * h), mode=LOCALIZED,
                        chart=chart)
        try:
            approx = H.evaluate_batch(grid, workers=workers)
        except UncoveredPointError as exc:
            raise UncoveredPointError(
                delta=exc.delta, indices=exc.indices, point=exc.point,
                message=f"level {j}: {len(exc.indices)} evaluation points uncovered with "
                        f"delta = {K} * h = {K * h:.6g}; increase K") from exc
        err = np.abs(f_grid - approx)
        rec = ConvergenceRecord(j, n, h, float(np.max(err)), float(np.sqrt(np.mean(err * err))))
        log.info("level %d: n=%d h=%.4g max=%.4g rms=%.4g", j, n, h, rec.max_error, rec.rms_error)
        records.append(rec)

    scale = max(1.0, float(np.max(np.abs(f_grid))))
    fit, reason = None, None
    if f.degree is not None and f.degree <= q:
        reason = f"polynomial of degree {f.degree} <= q = {q} is reproduced exactly"
    elif min(r.max_error for r in records) <= 1e-12 * scale:
        reason = "errors at rounding level"
    else:
        fit = fit_order(records)

    lip = chart_lipschitz(chart, sample_patch(patch, 300, "quasi-uniform", seed=seed))
    params = dict(function=f.name, q=q, levels=levels, seed=seed, K=K, n0=n0,
                  ref_factor=ref_factor, n_eval=n_eval, mu=H.weights.mu,
                  bump_exponent=H.weights.bump_exponent)
    return ConvergenceResult(records, fit, reason, q, K, lip, params)
