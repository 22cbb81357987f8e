"""Manifolds, geodesic distances, charts and point sampling.

Three geometries are supported, all with closed-form geodesic distance:

* the sphere of radius ``R`` embedded in R^3 (chart dimension 2),
* the flat torus R^m / (P_1 Z x ... x P_m Z),
* Euclidean space R^m.

Points are plain float arrays of ambient coordinates, shape ``(ambient_dim,)``
for a single point or ``(n, ambient_dim)`` for a batch.  Interpolation
domains are geodesic balls (:class:`Patch`) covered by a single chart.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.stats import qmc

from hbinterp.errors import ConfigurationError, InvalidPointError, OutOfChartError

SPHERE = "sphere"
TORUS = "torus"
EUCLIDEAN = "euclidean"

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


@dataclass(frozen=True)
class Manifold:
    """Geometry descriptor.

    Use the :meth:`sphere`, :meth:`torus` and :meth:`euclidean` constructors
    rather than filling the fields by hand.
    """

    kind: str
    radius: float = 1.0
    periods: Optional[tuple] = None
    dim: int = 2

    def __post_init__(self):
        if self.kind == SPHERE:
            if not (np.isfinite(self.radius) and self.radius > 0):
                raise ConfigurationError(f"sphere radius must be > 0, got {self.radius}")
            object.__setattr__(self, "dim", 2)
        elif self.kind == TORUS:
            if self.periods is None or len(self.periods) < 1:
                raise ConfigurationError("torus needs at least one period")
            periods = tuple(float(p) for p in self.periods)
            if not all(np.isfinite(p) and p > 0 for p in periods):
                raise ConfigurationError(f"torus periods must be > 0, got {periods}")
            object.__setattr__(self, "periods", periods)
            object.__setattr__(self, "dim", len(periods))
        elif self.kind == EUCLIDEAN:
            if int(self.dim) < 1:
                raise ConfigurationError(f"euclidean dimension must be >= 1, got {self.dim}")
            object.__setattr__(self, "dim", int(self.dim))
        else:
            raise ConfigurationError(f"unknown manifold kind {self.kind!r}")

    @classmethod
    def sphere(cls, radius=1.0):
        return cls(SPHERE, radius=float(radius))

    @classmethod
    def torus(cls, periods):
        return cls(TORUS, periods=tuple(periods))

    @classmethod
    def euclidean(cls, dim=2):
        return cls(EUCLIDEAN, dim=int(dim))

    @property
    def ambient_dim(self):
        return 3 if self.kind == SPHERE else self.dim

    def validate_points(self, points):
        """Return ``points`` as a float array, checked to lie on the manifold.

        Torus coordinates are reduced into the fundamental cell [0, P_j).
        """
        pts = np.array(points, dtype=float)
        if pts.shape[-1:] != (self.ambient_dim,):
            raise InvalidPointError(
                f"expected points with {self.ambient_dim} coordinates, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidPointError("point coordinates must be finite")
        if self.kind == SPHERE:
            norms = np.linalg.norm(pts, axis=-1)
            bad = np.abs(norms - self.radius) > 1e-12 * self.radius
            if np.any(bad):
                worst = float(np.max(np.abs(norms - self.radius)))
                raise InvalidPointError(
                    f"point not on sphere of radius {self.radius}: |norm - R| = {worst:.3g}")
        elif self.kind == TORUS:
            pts = np.mod(pts, self.periods)
            # mod can round up to exactly P for tiny negative inputs
            pts = np.where(pts >= self.periods, 0.0, pts)
        return pts


def geodesic_distance(manifold, u, w):
    """Geodesic distance between ``u`` and ``w`` (broadcasting over batches).

    On the sphere this is ``R * atan2(|u x w|, u . w)``, which stays accurate
    for nearly coincident and nearly antipodal points.  On the torus each
    coordinate difference is wrapped to the shorter way around.
    """
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    if manifold.kind == SPHERE:
        cross = np.linalg.norm(np.cross(u, w), axis=-1)
        dot = np.sum(u * w, axis=-1)
        return manifold.radius * np.arctan2(cross, dot)
    diff = u - w
    if manifold.kind == TORUS:
        periods = np.asarray(manifold.periods)
        diff = np.abs(np.mod(diff, periods))
        diff = np.minimum(diff, periods - diff)
    return np.linalg.norm(diff, axis=-1)


def chord_radius(manifold, delta):
    """Ambient-space search radius equivalent to geodesic radius ``delta``."""
    if manifold.kind != SPHERE:
        return float(delta)
    R = manifold.radius
    if delta >= np.pi * R:
        return 2.0 * R
    return 2.0 * R * np.sin(delta / (2.0 * R))


@dataclass(frozen=True, eq=False)
class Patch:
    """Closed geodesic ball ``{u : d_g(u, center) <= radius}``.

    ``radius=None`` means the whole manifold, allowed on the sphere and the
    torus only.  Sphere patches must stay away from the antipode of the
    centre (radius < pi R); torus patches must fit in one period cell.
    """

    manifold: Manifold
    center: np.ndarray
    radius: Optional[float] = None

    def __post_init__(self):
        center = self.manifold.validate_points(self.center)
        if center.ndim != 1:
            raise InvalidPointError("patch center must be a single point")
        object.__setattr__(self, "center", center)
        M = self.manifold
        if self.radius is None:
            if M.kind == EUCLIDEAN:
                raise ConfigurationError("euclidean patches need a finite radius")
            return
        r = float(self.radius)
        object.__setattr__(self, "radius", r)
        if not (np.isfinite(r) and r > 0):
            raise ConfigurationError(f"patch radius must be > 0, got {r}")
        if M.kind == SPHERE and r >= np.pi * M.radius:
            raise ConfigurationError(
                f"sphere patch radius {r} must be < pi*R = {np.pi * M.radius}")
        if M.kind == TORUS and r >= 0.5 * min(M.periods):
            raise ConfigurationError(
                f"torus patch radius {r} must be < half the smallest period")

    @property
    def is_whole(self):
        return self.radius is None

    @property
    def diameter(self):
        M = self.manifold
        if self.radius is not None:
            return 2.0 * self.radius
        if M.kind == SPHERE:
            return np.pi * M.radius
        return 0.5 * float(np.linalg.norm(M.periods))

    @property
    def extent(self):
        """Largest distance from the centre to a point of the patch."""
        if self.radius is not None:
            return self.radius
        M = self.manifold
        if M.kind == SPHERE:
            return np.pi * M.radius
        return 0.5 * float(np.linalg.norm(M.periods))

    def contains(self, points, slack=1e-12):
        if self.radius is None:
            return np.ones(np.shape(points)[:-1], dtype=bool)
        d = geodesic_distance(self.manifold, points, self.center)
        return d <= self.radius * (1.0 + slack)


def _sphere_frame(center_unit):
    """Orthonormal rows (e1, e2, c) with e1, e2 spanning the tangent plane.

    The north pole gets the standard (x, y, z) frame.
    """
    c = center_unit
    helper = np.array([1.0, 0.0, 0.0])
    if abs(c[0]) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    e1 = helper - np.dot(helper, c) * c
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(c, e1)
    return np.vstack([e1, e2, c])


@dataclass(frozen=True, eq=False)
class Chart:
    """Single chart covering a patch.

    ``kind`` is ``"stereographic"`` on the sphere (projection from the
    antipode of the patch centre onto the plane through the origin orthogonal
    to it; the centre maps to 0), ``"unwrap"`` on the torus (coordinates
    relative to the centre, wrapped into [-P/2, P/2)), and ``"identity"`` on
    Euclidean space (v = u, no recentring).
    """

    manifold: Manifold
    center: np.ndarray
    kind: str = field(default="")
    _frame: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        M = self.manifold
        center = M.validate_points(self.center)
        object.__setattr__(self, "center", center)
        expected = {SPHERE: "stereographic", TORUS: "unwrap", EUCLIDEAN: "identity"}[M.kind]
        if self.kind and self.kind != expected:
            raise ConfigurationError(f"chart kind {self.kind!r} not available on a {M.kind}")
        object.__setattr__(self, "kind", expected)
        if M.kind == SPHERE:
            object.__setattr__(self, "_frame", _sphere_frame(center / M.radius))

    @classmethod
    def for_patch(cls, patch):
        return cls(patch.manifold, patch.center)

    @property
    def dim(self):
        return self.manifold.dim

    def forward(self, points):
        """Chart coordinates ``v = phi(u)`` for one point or a batch."""
        M = self.manifold
        u = np.asarray(points, dtype=float)
        if self.kind == "stereographic":
            R = M.radius
            local = u @ self._frame.T
            denom = R + local[..., 2]
            if np.any(denom <= 1e-12 * R):
                raise OutOfChartError(
                    "point at the antipode of the chart centre is outside the chart")
            return R * local[..., :2] / denom[..., None]
        if self.kind == "unwrap":
            periods = np.asarray(M.periods)
            return np.mod(u - self.center + 0.5 * periods, periods) - 0.5 * periods
        return u.copy()

    def inverse(self, v):
        """Point ``u = phi^{-1}(v)`` for one chart vector or a batch."""
        M = self.manifold
        v = np.asarray(v, dtype=float)
        if v.shape[-1:] != (self.dim,):
            raise OutOfChartError(f"expected {self.dim} chart coordinates, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise OutOfChartError("chart coordinates must be finite")
        if self.kind == "stereographic":
            R = M.radius
            w = v / R
            s = np.sum(w * w, axis=-1)[..., None]
            local = np.concatenate([2.0 * w, 1.0 - s], axis=-1) / (1.0 + s)
            return R * (local @ self._frame)
        if self.kind == "unwrap":
            periods = np.asarray(M.periods)
            if np.any(v < -0.5 * periods) or np.any(v >= 0.5 * periods):
                raise OutOfChartError("chart coordinates outside the period cell [-P/2, P/2)")
            return M.validate_points(self.center + v)
        return v.copy()


def chart_forward(chart, u):
    return chart.forward(u)


def chart_inverse(chart, v):
    return chart.inverse(v)


def chart_lipschitz(chart, points):
    """Largest ratio ``|v(u) - v(w)| / d_g(u, w)`` over all pairs of ``points``."""
    pts = np.asarray(points, dtype=float)
    v = chart.forward(pts)
    iu, iw = np.triu_indices(len(pts), k=1)
    d = geodesic_distance(chart.manifold, pts[iu], pts[iw])
    dv = np.linalg.norm(v[iu] - v[iw], axis=-1)
    keep = d > 0
    return float(np.max(dv[keep] / d[keep]))


def _unit_ball(m, n, strategy, rng, offset):
    """``n`` points in the closed unit ball of R^m."""
    if strategy == "uniform":
        x = rng.standard_normal((n, m))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        return x * rng.uniform(0.0, 1.0, (n, 1)) ** (1.0 / m)
    i = np.arange(n) + 0.5
    if m == 1:
        return (2.0 * i / n - 1.0)[:, None]
    if m == 2:
        r = np.sqrt(i / n)
        phi = GOLDEN_ANGLE * np.arange(n) + offset
        return np.column_stack([r * np.cos(phi), r * np.sin(phi)])
    sampler = qmc.Halton(d=m, scramble=True, seed=rng)
    out = np.empty((0, m))
    while len(out) < n:
        x = 2.0 * sampler.random(2 * n * 2 ** m) - 1.0
        out = np.vstack([out, x[np.sum(x * x, axis=1) <= 1.0]])
    return out[:n]


def sample_patch(patch, n, strategy="quasi-uniform", seed=None):
    """Sample ``n`` points inside ``patch``.

    Parameters
    ----------
    patch : Patch
    n : int
        Number of points, at least 1.
    strategy : {"quasi-uniform", "uniform"}
        ``"uniform"`` draws independent area-uniform points.
        ``"quasi-uniform"`` uses a spherical Fibonacci spiral on sphere caps,
        a sunflower spiral on flat discs, evenly spaced midpoints in 1-D and
        scrambled Halton points otherwise; the seed only rotates the spiral.
    seed : int or None
        Fixes the output; identical seeds give identical points.

    Returns
    -------
    ndarray of shape (n, ambient_dim)
    """
    if n < 1:
        raise ConfigurationError(f"need n >= 1 sample points, got {n}")
    if strategy not in ("quasi-uniform", "uniform"):
        raise ConfigurationError(f"unknown sampling strategy {strategy!r}")
    rng = np.random.default_rng(seed)
    offset = rng.uniform(0.0, 2.0 * np.pi) if seed is not None else 0.0
    M = patch.manifold

    if M.kind == SPHERE:
        R = M.radius
        theta_max = patch.extent / R
        lo = np.cos(theta_max)
        if strategy == "uniform":
            cos_t = rng.uniform(lo, 1.0, n)
            phi = rng.uniform(0.0, 2.0 * np.pi, n)
        else:
            t = (np.arange(n) + 0.5) / n
            cos_t = 1.0 - t * (1.0 - lo)
            phi = GOLDEN_ANGLE * np.arange(n) + offset
        sin_t = np.sqrt(np.clip(1.0 - cos_t * cos_t, 0.0, None))
        local = np.column_stack([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t])
        pts = local @ _sphere_frame(patch.center / R)
        # renormalise so the on-sphere check holds to rounding
        return R * pts / np.linalg.norm(pts, axis=1, keepdims=True)

    if patch.radius is None:
        # whole torus: quasi-uniform lattice-free fill of the period cell
        periods = np.asarray(M.periods)
        if strategy == "uniform":
            x = rng.uniform(0.0, 1.0, (n, M.dim))
        else:
            x = qmc.Halton(d=M.dim, scramble=True, seed=rng).random(n)
        return M.validate_points(x * periods)

    ball = _unit_ball(M.dim, n, strategy, rng, offset) * patch.radius
    return M.validate_points(patch.center + ball)
