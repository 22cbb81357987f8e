"""Cardinal basis functions built from geodesic distances.

Three forms of the same weights are provided:

* :func:`cbf_product` -- products of ``alpha(u, z_j) = d_g(u, z_j)**mu`` over
  all other nodes.  Reference form only; the products under/overflow for
  more than a few dozen nodes.
* :func:`cbf_inverse` -- the equivalent inverse-distance (Shepard) form,
  evaluated as ``(d_min/d_i)**mu / sum_k (d_min/d_k)**mu`` so that nothing
  overflows.
* :func:`cbf_localized` -- inverse-distance weights multiplied by the
  compactly supported bump ``(1 - d/delta)_+**s`` and restricted to the
  nodes found by a :class:`NeighborIndex` range query.

All three return exact unit vectors when the evaluation point is within
``tol`` of a node.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from hbinterp.errors import (
    ConfigurationError,
    InvalidNodeSetError,
    UncoveredPointError,
)
from hbinterp.geometry import TORUS, chord_radius, geodesic_distance


@dataclass(frozen=True)
class WeightConfig:
    """Weight parameters.

    Unset values are filled by :meth:`resolve`: ``mu = k + 1`` and
    ``bump_exponent = k + 1`` where ``k`` is the largest derivative order in
    the data.  ``near_node_tol`` is a fraction of the patch diameter.
    """

    mu: Optional[float] = None
    delta: Optional[float] = None
    bump_exponent: Optional[int] = None
    near_node_tol: float = 1e-12

    def resolve(self, k):
        """Fill defaults for derivative order ``k`` and validate."""
        cfg = replace(
            self,
            mu=float(k + 1) if self.mu is None else float(self.mu),
            bump_exponent=k + 1 if self.bump_exponent is None else self.bump_exponent,
        )
        cfg.validate(k)
        return cfg

    def validate(self, k):
        if self.mu is None or not np.isfinite(self.mu) or self.mu <= k:
            raise ConfigurationError(
                f"mu must satisfy mu > k (k = {k} is the largest derivative order), "
                f"got mu = {self.mu}")
        if self.delta is not None and not (np.isfinite(self.delta) and self.delta > 0):
            raise ConfigurationError(f"delta must be > 0, got {self.delta}")
        s = self.bump_exponent
        if s is None or int(s) != s or s < max(1, k + 1):
            raise ConfigurationError(
                f"bump_exponent must be an integer >= k + 1 = {k + 1}, got {s}")
        if not (0.0 < self.near_node_tol <= 1e-8):
            raise ConfigurationError(
                f"near_node_tol must lie in (0, 1e-8], got {self.near_node_tol}")


def alpha_power(d, mu):
    """``d ** mu``; vanishes together with its first ``ceil(mu) - 1`` derivatives at 0."""
    return np.power(np.asarray(d, dtype=float), mu)


def bump(r, delta, s):
    """Truncated power ``(1 - r/delta)**s`` for ``r < delta``, zero beyond."""
    r = np.asarray(r, dtype=float)
    t = np.clip(1.0 - r / delta, 0.0, None)
    out = t ** int(s)
    return out if out.ndim else float(out)


def check_distinct(nodes, manifold):
    nodes = np.asarray(nodes, dtype=float)
    if len(nodes) < 2:
        return
    pairs = _make_tree(nodes, manifold).query_pairs(r=0.0, output_type="ndarray")
    if len(pairs):
        i, j = pairs[0]
        raise InvalidNodeSetError(f"duplicate nodes: {int(i)} and {int(j)} coincide")


def _unit(n, i):
    out = np.zeros(n)
    out[i] = 1.0
    return out


def inverse_weights(d, mu, tol=0.0):
    """Inverse-distance cardinal weights from distances ``d`` (last axis: nodes)."""
    d = np.asarray(d, dtype=float)
    i_min = np.argmin(d, axis=-1)[..., None]
    d_min = np.take_along_axis(d, i_min, axis=-1)
    snap = (d_min == 0.0) | (d_min < tol)
    w = np.where(snap, 0.0, (d_min / np.where(snap, 1.0, d)) ** mu)
    # the nearest node has weight (d_min/d_min)**mu = 1, or is the snapped unit entry
    np.put_along_axis(w, i_min, 1.0, axis=-1)
    return w / np.sum(w, axis=-1, keepdims=True)


def _distances(u, nodes, manifold):
    u = np.asarray(u, dtype=float)
    if u.ndim == 2:
        return geodesic_distance(manifold, u[:, None, :], nodes[None, :, :])
    return geodesic_distance(manifold, u, nodes)


def cbf_product(u, nodes, mu, manifold):
    """Cardinal weights in product form, ``prod_{j != i} alpha_j / sum_k prod_{j != k} alpha_j``.

    ``u`` is one point or a ``(p, ambient)`` batch; a batch gives ``(p, n)`` weights.
    """
    nodes = np.asarray(nodes, dtype=float)
    check_distinct(nodes, manifold)
    alpha = alpha_power(_distances(u, nodes, manifold), mu)
    n = alpha.shape[-1]
    prods = np.stack([np.prod(np.delete(alpha, i, axis=-1), axis=-1) for i in range(n)], axis=-1)
    return prods / np.sum(prods, axis=-1, keepdims=True)


def cbf_inverse(u, nodes, mu, manifold, tol=0.0):
    """Cardinal weights ``d_i**-mu / sum_k d_k**-mu``.

    ``tol`` is an absolute distance: within it of a node the exact unit
    vector for that node is returned.  ``u`` may be a batch as in
    :func:`cbf_product`.
    """
    nodes = np.asarray(nodes, dtype=float)
    check_distinct(nodes, manifold)
    return inverse_weights(_distances(u, nodes, manifold), mu, tol)


def _make_tree(points, manifold):
    if manifold.kind == TORUS:
        return cKDTree(points, boxsize=np.asarray(manifold.periods))
    return cKDTree(points)


class NeighborIndex:
    """Range queries ``{i : d_g(u, z_i) < delta}`` over a fixed node set.

    Backed by a k-d tree on ambient coordinates (periodic on the torus).  On
    the sphere the geodesic radius is converted to the chord radius
    ``2R sin(delta / 2R)``.  Candidates are re-filtered with the exact
    geodesic distance, so results match a brute-force scan.
    """

    def __init__(self, nodes, manifold):
        self.nodes = np.asarray(nodes, dtype=float)
        self.manifold = manifold
        self._tree = _make_tree(self.nodes, manifold)
        check_distinct(self.nodes, manifold)

    def __len__(self):
        return len(self.nodes)

    def _search_radius(self, delta):
        # widened slightly; the exact filter below removes the excess
        return chord_radius(self.manifold, delta) * (1.0 + 1e-9) + 1e-300

    def query(self, u, delta):
        """Sorted node indices within geodesic distance ``< delta`` of ``u``."""
        if delta <= 0:
            return np.empty(0, dtype=np.intp)
        cand = np.asarray(self._tree.query_ball_point(u, self._search_radius(delta)), dtype=np.intp)
        if len(cand) == 0:
            return cand
        d = geodesic_distance(self.manifold, u, self.nodes[cand])
        return np.sort(cand[d < delta])

    def query_many(self, points, delta):
        points = np.asarray(points, dtype=float)
        if delta <= 0:
            return [np.empty(0, dtype=np.intp) for _ in range(len(points))]
        hits = self._tree.query_ball_point(points, self._search_radius(delta))
        out = []
        for u, cand in zip(points, hits):
            cand = np.asarray(cand, dtype=np.intp)
            if len(cand):
                d = geodesic_distance(self.manifold, u, self.nodes[cand])
                cand = np.sort(cand[d < delta])
            out.append(cand)
        return out

    def nearest(self, points, k=1):
        """Indices of the ``k`` nearest nodes to each point (geodesic order)."""
        points = np.asarray(points, dtype=float)
        k = min(k, len(self.nodes))
        _, idx = self._tree.query(points, k=k)
        return idx


def min_pair_distance(points, manifold):
    """Smallest geodesic distance between two nodes (0 if two coincide)."""
    points = np.asarray(points, dtype=float)
    _, nn = _make_tree(points, manifold).query(points, k=min(4, len(points)))
    best = np.inf
    for i, row in enumerate(np.atleast_2d(nn)):
        others = [j for j in row if j != i]
        if others:
            best = min(best, float(np.min(geodesic_distance(manifold, points[i], points[others]))))
    return best


def build_neighbor_index(nodes, manifold):
    return NeighborIndex(nodes, manifold)


def localized_weights(d, mu, delta, s, tol=0.0):
    """Localized cardinal weights from the distances to the in-range nodes."""
    d = np.asarray(d, dtype=float)
    i_min = int(np.argmin(d))
    d_min = d[i_min]
    if d_min == 0.0 or d_min < tol:
        return _unit(len(d), i_min)
    w = bump(d, delta, s) * (d_min / d) ** mu
    return w / np.sum(w)


def cbf_localized(u, nodes, mu, delta, s, index, tol=0.0):
    """Localized cardinal weights as a sparse vector.

    Returns
    -------
    indices : ndarray of int
        Nodes with ``d_g(u, z_i) < delta``.
    values : ndarray
        Weights for those nodes; they sum to one.

    Raises
    ------
    UncoveredPointError
        If no node lies within ``delta`` of ``u``.
    """
    idx = index.query(u, delta)
    if len(idx) == 0:
        raise UncoveredPointError(point=np.asarray(u).tolist(), delta=delta)
    d = geodesic_distance(index.manifold, u, np.asarray(nodes, dtype=float)[idx])
    return idx, localized_weights(d, mu, delta, s, tol)
