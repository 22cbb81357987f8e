"""Closed-form functions of the chart coordinates with exact partials.

These supply exact Hermite data ``D^beta f(z_i)`` for tests and convergence
studies.  All evaluators are vectorised over an ``(N, m)`` array of chart
points.
"""

from __future__ import annotations

from math import perm

import numpy as np
from numpy.polynomial import hermite as npherm

from hbinterp.errors import OrderExceededError, UnknownFunctionError
from hbinterp.multiindex import make_index, zero_index

BUILTINS = ("constant", "linear", "quadratic", "trig-product", "gaussian")

DEFAULT_MAX_ORDER = 4


class TestFunction:
    """A scalar function of chart coordinates with analytic partials.

    Parameters
    ----------
    name : str
    m : int
        Chart dimension.
    partial : callable
        ``partial(v, beta) -> ndarray`` with ``v`` of shape ``(N, m)``.
    max_order : int
        Highest derivative order that may be requested.
    degree : int or None
        Polynomial degree, or None for non-polynomial functions.
    """

    __test__ = False  # not a pytest class

    def __init__(self, name, m, partial, max_order=DEFAULT_MAX_ORDER, degree=None):
        self.name = name
        self.m = m
        self.max_order = max_order
        self.degree = degree
        self._partial = partial

    def __repr__(self):
        return f"TestFunction({self.name!r}, m={self.m})"

    def derivative(self, v, beta):
        beta = make_index(beta, self.m)
        if sum(beta) > self.max_order:
            raise OrderExceededError(
                f"{self.name}: derivative order {sum(beta)} exceeds max_order {self.max_order}")
        v = np.asarray(v, dtype=float)
        single = v.ndim == 1
        out = np.asarray(self._partial(np.atleast_2d(v), beta), dtype=float)
        out = np.broadcast_to(out, (np.atleast_2d(v).shape[0],)).copy()
        return float(out[0]) if single else out

    def __call__(self, v):
        return self.derivative(v, zero_index(self.m))

    def hermite_data(self, v, delta):
        """``{beta: D^beta f(v)}`` for every ``beta`` in ``delta`` (one point)."""
        return {beta: self.derivative(v, beta) for beta in delta}


def _constant(m, c=1.0):
    def partial(v, beta):
        return np.full(len(v), float(c) if sum(beta) == 0 else 0.0)
    return TestFunction("constant", m, partial, degree=0)


def _linear(m, a=None, b=1.0):
    a = np.arange(2.0, 2.0 + m) if a is None else np.asarray(a, dtype=float)
    if a.shape != (m,):
        raise ValueError(f"linear coefficient vector must have length {m}")

    def partial(v, beta):
        n = sum(beta)
        if n == 0:
            return v @ a + b
        if n == 1:
            return np.full(len(v), a[beta.index(1)])
        return np.zeros(len(v))
    return TestFunction("linear", m, partial, degree=1)


def _quadratic(m, A=None, b=None, c=0.5):
    """``0.5 v^T A v + b.v + c``"""
    if A is None:
        A = np.eye(m) * np.arange(2.0, 2.0 + m) + 0.5 * (np.ones((m, m)) - np.eye(m))
    A = np.asarray(A, dtype=float)
    A = 0.5 * (A + A.T)
    b = np.linspace(1.0, -1.0, m) if b is None else np.asarray(b, dtype=float)

    def partial(v, beta):
        n = sum(beta)
        if n == 0:
            return 0.5 * np.einsum("ni,ij,nj->n", v, A, v) + v @ b + c
        if n == 1:
            j = beta.index(1)
            return v @ A[j] + b[j]
        if n == 2:
            nz = [j for j, bj in enumerate(beta) for _ in range(bj)]
            return np.full(len(v), A[nz[0], nz[1]])
        return np.zeros(len(v))
    return TestFunction("quadratic", m, partial, degree=2)


def _trig_product(m, omega=1.0):
    """``prod_j cos(omega v_j)``"""
    def partial(v, beta):
        out = np.ones(len(v))
        for j, bj in enumerate(beta):
            # d^n/dx^n cos(w x) = w^n cos(w x + n pi/2)
            out = out * omega ** bj * np.cos(omega * v[:, j] + bj * np.pi / 2)
        return out
    return TestFunction("trig-product", m, partial)


def _gaussian(m, c=1.0, center=None):
    """``exp(-c |v - center|^2)``; partials through Hermite polynomials."""
    center = np.zeros(m) if center is None else np.asarray(center, dtype=float)
    sc = np.sqrt(c)

    def partial(v, beta):
        x = v - center
        out = np.exp(-c * np.sum(x * x, axis=1))
        for j, bj in enumerate(beta):
            if bj:
                # d^n/dx^n exp(-c x^2) = (-sqrt c)^n H_n(sqrt c x) exp(-c x^2)
                coef = np.zeros(bj + 1)
                coef[bj] = 1.0
                out = out * (-sc) ** bj * npherm.hermval(sc * x[:, j], coef)
        return out
    return TestFunction("gaussian", m, partial)


_FACTORIES = {
    "constant": _constant,
    "linear": _linear,
    "quadratic": _quadratic,
    "trig-product": _trig_product,
    "gaussian": _gaussian,
}


def builtin(name, m=2, **params):
    """Look up a builtin test function by name.

    >>> builtin("gaussian", 2, c=1.0).derivative([0.0, 0.0], (2, 0))
    -2.0
    """
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise UnknownFunctionError(
            f"unknown test function {name!r}; choose from {', '.join(BUILTINS)}") from None
    return factory(m, **params)


def polynomial(m, coefficients):
    """Chart-coordinate polynomial ``sum_alpha c_alpha v**alpha``.

    ``coefficients`` maps exponent multi-indices to coefficients.  Partials
    are exact for every order.
    """
    coefficients = {make_index(a, m): float(c) for a, c in coefficients.items()}
    degree = max((sum(a) for a, c in coefficients.items() if c != 0.0), default=0)

    def partial(v, beta):
        out = np.zeros(len(v))
        for alpha, c in coefficients.items():
            if any(a < b for a, b in zip(alpha, beta)):
                continue
            term = np.full(len(v), c)
            for j, (a, b) in enumerate(zip(alpha, beta)):
                term = term * perm(a, b) * v[:, j] ** (a - b)
            out += term
        return out
    return TestFunction("polynomial", m, partial, max_order=max(degree + 1, DEFAULT_MAX_ORDER),
                        degree=degree)


def _stencil(order):
    """Second-order central stencil ``(offsets, weights)`` for ``d^order/dx^order``."""
    if order == 0:
        return np.array([0]), np.array([1.0])
    r = (order + 1) // 2
    offsets = np.arange(-r, r + 1)
    vander = np.vander(offsets.astype(float), increasing=True).T
    rhs = np.zeros(len(offsets))
    rhs[order] = float(np.prod(np.arange(1, order + 1)))
    return offsets, np.linalg.solve(vander, rhs)


def central_difference(func, v, beta, step):
    """Tensor-product central finite difference of ``func`` at ``v``.

    ``func`` maps an ``(N, m)`` array of chart points to ``N`` values, or
    to an ``(N, p)`` array for vector-valued functions (an array of ``p``
    differences is returned).  The stencil error is ``O(step**2)``.
    """
    v = np.asarray(v, dtype=float)
    m = len(v)
    axes = [_stencil(b) for b in beta]
    offsets = np.array(np.meshgrid(*[o for o, _ in axes], indexing="ij")).reshape(m, -1).T
    weights = np.ones(len(offsets))
    for j, (_, w) in enumerate(axes):
        grid = np.meshgrid(*[w if i == j else np.ones(len(axes[i][1])) for i in range(m)],
                           indexing="ij")[j].ravel()
        weights = weights * grid
    keep = weights != 0.0
    values = np.asarray(func(v + step * offsets[keep]), dtype=float)
    out = np.tensordot(weights[keep], values, axes=1) / step ** sum(beta)
    return float(out) if out.ndim == 0 else out


def derivative_check(f, v, beta, fd_step):
    """Residual of one analytic partial against a finite difference.

    The partial ``D^beta f`` is compared with a central difference, in one
    coordinate direction, of the next-lower analytic partial; for ``|beta| = 1``
    that is ``f`` itself.  Chaining the check over all orders anchors every
    hand-coded partial to the function values.
    """
    beta = make_index(beta, f.m)
    if sum(beta) > f.max_order:
        raise OrderExceededError(
            f"{f.name}: derivative order {sum(beta)} exceeds max_order {f.max_order}")
    if sum(beta) == 0:
        return 0.0
    j = next(i for i, b in enumerate(beta) if b)
    lower = tuple(b - (i == j) for i, b in enumerate(beta))
    unit = np.zeros(f.m)
    unit[j] = 1.0
    fd = central_difference(lambda pts: f.derivative(pts, lower), v, unit.astype(int), fd_step)
    return abs(f.derivative(v, beta) - fd)
