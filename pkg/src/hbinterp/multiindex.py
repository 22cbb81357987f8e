"""Multi-indices, derivative-order sets and incomplete Taylor expansions.

A multi-index is a tuple of non-negative ints ``(b_1, ..., b_m)``.  A
:class:`MultiIndexSet` is the set of derivative orders known at one node; it
always contains the zero index.
"""

from __future__ import annotations

import itertools
from math import factorial

import numpy as np

from hbinterp.errors import InconsistentDataError, ValidationError


def make_index(components, m=None):
    components = list(components)
    beta = tuple(int(b) for b in components)
    if any(b < 0 for b in beta) or any(b != c for b, c in zip(beta, components)):
        raise ValidationError(f"multi-index components must be non-negative integers: {components!r}")
    if m is not None and len(beta) != m:
        raise ValidationError(f"multi-index {beta} has {len(beta)} components, expected {m}")
    return beta


def order(beta):
    return sum(beta)


def zero_index(m):
    return (0,) * m


def format_index(beta):
    """``(1, 0)`` -> ``"1,0"``"""
    return ",".join(str(b) for b in beta)


def parse_index(text, m=None):
    """``"1,0"`` -> ``(1, 0)``"""
    try:
        parts = [int(p) for p in str(text).split(",")]
    except ValueError:
        raise ValidationError(f"malformed multi-index {text!r}") from None
    return make_index(parts, m)


def indices_up_to(m, q):
    """All multi-indices of length ``m`` with total order ``<= q``, graded."""
    out = [beta for beta in itertools.product(range(q + 1), repeat=m) if sum(beta) <= q]
    return sorted(out, key=lambda b: (sum(b), tuple(-c for c in b)))


class MultiIndexSet:
    """Immutable, ordered set of distinct multi-indices containing zero."""

    __slots__ = ("_indices", "m")

    def __init__(self, indices, m=None):
        idx = [tuple(b) for b in indices]
        if not idx:
            raise ValidationError("a multi-index set must contain the zero index")
        if m is None:
            m = len(idx[0])
        idx = [make_index(b, m) for b in idx]
        if len(set(idx)) != len(idx):
            raise ValidationError(f"duplicate multi-indices in {idx}")
        if zero_index(m) not in idx:
            raise ValidationError(f"multi-index set {idx} does not contain the zero index")
        idx.sort(key=lambda b: (sum(b), tuple(-c for c in b)))
        self._indices = tuple(idx)
        self.m = m

    @classmethod
    def complete(cls, m, q):
        return cls(indices_up_to(m, q), m)

    @classmethod
    def lagrange(cls, m):
        return cls([zero_index(m)], m)

    def __iter__(self):
        return iter(self._indices)

    def __len__(self):
        return len(self._indices)

    def __contains__(self, beta):
        return tuple(beta) in self._indices

    def __eq__(self, other):
        if not isinstance(other, MultiIndexSet):
            return NotImplemented
        return self.m == other.m and set(self._indices) == set(other._indices)

    def __hash__(self):
        return hash((self.m, frozenset(self._indices)))

    def __repr__(self):
        return f"MultiIndexSet({list(self._indices)!r})"

    @property
    def max_order(self):
        return max(sum(b) for b in self._indices)


def global_order_k(sets):
    """Largest derivative order over all node sets."""
    sets = list(sets)
    if not sets:
        raise ValidationError("global_order_k needs at least one multi-index set")
    return max(s.max_order for s in sets)


def completeness_order(delta):
    """Largest ``q`` such that every index of order ``<= q`` is in ``delta``."""
    present = set(delta)
    q = 0
    while True:
        if all(beta in present for beta in indices_up_to(delta.m, q + 1)):
            q += 1
        else:
            return q


def multi_factorial(beta):
    out = 1
    for b in beta:
        out *= factorial(b)
    return out


def int_power(x, p):
    """``x ** p`` for a non-negative integer ``p`` by repeated squaring."""
    result = np.ones_like(x, dtype=float)
    base = np.asarray(x, dtype=float)
    while p:
        if p & 1:
            result = result * base
        p >>= 1
        if p:
            base = base * base
    return result


def monomial(diff, beta):
    """``prod_j diff[..., j] ** beta_j`` over the last axis of ``diff``."""
    diff = np.asarray(diff, dtype=float)
    out = np.ones(diff.shape[:-1])
    for j, b in enumerate(beta):
        if b:
            out = out * int_power(diff[..., j], b)
    return out


def taylor_eval(v, v_center, data, delta=None):
    """Incomplete Taylor expansion at ``v_center`` evaluated at ``v``.

    Parameters
    ----------
    v : array_like, shape (m,) or (N, m)
        Chart coordinates of the evaluation point(s).
    v_center : array_like, shape (m,)
        Chart coordinates of the expansion point.
    data : dict
        Maps each multi-index ``beta`` to the partial derivative value
        ``D^beta f`` at the expansion point.
    delta : MultiIndexSet, optional
        When given, the keys of ``data`` must be exactly this set.

    Returns
    -------
    float or ndarray
        ``sum_beta data[beta] * (v - v_center)**beta / beta!``
    """
    if delta is not None and set(map(tuple, data)) != set(delta):
        raise InconsistentDataError(
            f"data keys {sorted(data)} do not match the multi-index set {list(delta)}")
    diff = np.asarray(v, dtype=float) - np.asarray(v_center, dtype=float)
    total = np.zeros(diff.shape[:-1])
    for beta, value in data.items():
        total = total + value / multi_factorial(beta) * monomial(diff, beta)
    return total if total.ndim else float(total)
