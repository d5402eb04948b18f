"""Algebraic range-query framework: moment tuples, range polynomials and
the O(n) brute-force oracles.

A range aggregate is described by a triple of operations: a per-element
generator ``g_singleton``, a combiner ``f_merge`` that concatenates
adjacent sub-ranges, and (implicitly) a finalizer that extracts the
answer from the intermediate tuple.  Moment tuples carry
``(COUNT, sum, first moment, ...)`` about an anchor index, and adjacent
tuples combine after re-centering the right tuple onto the left anchor
with the binomial expansion.

Everything in this module is a pure function over immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, ParameterError

# Pascal's triangle, grown on demand. Row n holds C(n, 0..n).
_PASCAL: list[list[int]] = [[1]]


def binomial(n: int, k: int) -> int:
    """C(n, k) from a cached Pascal's triangle."""
    if k < 0 or k > n:
        return 0
    while len(_PASCAL) <= n:
        prev = _PASCAL[-1]
        _PASCAL.append([1] + [prev[i] + prev[i + 1] for i in range(len(prev) - 1)] + [1])
    return _PASCAL[n][k]


# Pre-grow the cache to the largest moment order we ever advertise.
binomial(32, 0)


@dataclass(frozen=True)
class MomentTuple:
    """Aggregate of a sub-range: ``values[0]`` is COUNT and ``values[t]``
    for ``t >= 1`` is the moment of order ``t - 1`` about ``anchor``,
    i.e. ``sum((i - anchor)**(t-1) * a_i)``.
    """

    values: tuple[float, ...]
    anchor: int

    @property
    def m(self) -> int:
        return len(self.values)

    @property
    def count(self) -> float:
        return self.values[0]

    def moment(self, order: int) -> float:
        """Moment of the given order (0 is the plain sum)."""
        return self.values[order + 1]


def empty_tuple(m: int, anchor: int = 0) -> MomentTuple:
    """The identity element: all components zero."""
    if m < 2:
        raise ParameterError(f"moment tuples need at least 2 components, got {m}")
    return MomentTuple((0.0,) * m, anchor)


def g_singleton(value: float, position: int, m: int) -> MomentTuple:
    """Tuple for the one-element range ``[position, position]``.

    COUNT is 1, the order-0 moment is the value itself, and all higher
    moments about the element's own position vanish.
    """
    if m < 2:
        raise ParameterError(f"moment tuples need at least 2 components, got {m}")
    return MomentTuple((1.0, float(value)) + (0.0,) * (m - 2), position)


def recenter(t: MomentTuple, new_anchor: int) -> MomentTuple:
    """Re-express the moments about a different anchor.

    Expanding ``((i - p) + (p - c))**k`` binomially, the order-k moment
    about ``c`` is ``sum_j C(k, j) * (p - c)**(k-j) * moment_j(about p)``.
    """
    if new_anchor == t.anchor:
        return t
    shift = float(t.anchor - new_anchor)
    out = [t.values[0]]
    for k in range(t.m - 1):
        acc = 0.0
        for j in range(k + 1):
            acc += binomial(k, j) * shift ** (k - j) * t.values[j + 1]
        out.append(acc)
    return MomentTuple(tuple(out), new_anchor)


def f_merge(left: MomentTuple, right: MomentTuple) -> MomentTuple:
    """Combine tuples of two adjacent ranges (left range first).

    The right tuple is re-centered onto the left anchor, then the
    components add. The result is anchored at ``left.anchor``.
    """
    if left.m != right.m:
        raise ParameterError(f"tuple arity mismatch: {left.m} vs {right.m}")
    if right.anchor < left.anchor:
        raise ParameterError("f_merge expects the right tuple to start at or after the left")
    shifted = recenter(right, left.anchor)
    return MomentTuple(
        tuple(a + b for a, b in zip(left.values, shifted.values)), left.anchor
    )


@dataclass(frozen=True)
class RangePolynomial:
    """A query weight function: polynomial on ``[lo, hi]`` (inclusive),
    exactly zero outside.

    ``coeffs`` are monomial coefficients about ``x = lo``, so
    ``f(i) = sum_t coeffs[t] * (i - lo)**t`` inside the range.
    """

    lo: int
    hi: int
    coeffs: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if self.lo > self.hi:
            raise ParameterError(f"empty range [{self.lo}, {self.hi}]")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    def __call__(self, x: int) -> float:
        if x < self.lo or x > self.hi:
            return 0.0
        t = float(x - self.lo)
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized evaluation with the outside-the-range zeroing."""
        xs = np.asarray(xs)
        t = (xs - self.lo).astype(np.float64)
        acc = np.zeros_like(t)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return np.where((xs >= self.lo) & (xs <= self.hi), acc, 0.0)


def range_sum(lo: int, hi: int) -> RangePolynomial:
    """The constant-1 weight, i.e. a plain range sum."""
    return RangePolynomial(lo, hi, (1.0,))


def range_moment(lo: int, hi: int, order: int) -> RangePolynomial:
    """Weight ``(i - lo)**order``: the query moment of the given order."""
    return RangePolynomial(lo, hi, (0.0,) * order + (1.0,))


@dataclass(frozen=True)
class QueryKind:
    """Which aggregate a bin buffer computes, with the two structural
    properties the buffering strategy depends on: linear kinds update in
    constant time, invertible kinds allow in-place hierarchical storage.
    """

    tag: str
    order_count: int = 0  # tuple arity m for "moments", unused otherwise

    @property
    def linear(self) -> bool:
        return self.tag in ("sum", "moments")

    @property
    def invertible(self) -> bool:
        return self.tag in ("sum", "moments")

    def __str__(self) -> str:
        if self.tag == "moments":
            return f"moments({self.order_count - 1})"
        return self.tag


SUM = QueryKind("sum")
MAX = QueryKind("max")


def moments(n: int) -> QueryKind:
    """Tuple kind buffering COUNT plus all moments of degree < n."""
    if n < 1:
        raise ParameterError("moment degree budget must be at least 1")
    return QueryKind("moments", n + 1)


def brute_query(a, f: RangePolynomial) -> float:
    """O(n) oracle: direct evaluation of ``sum f(i) * a_i`` over ``[f.lo, f.hi]``."""
    if f.lo < 0 or f.hi >= len(a):
        raise BoundsError(f"range [{f.lo}, {f.hi}] outside array of length {len(a)}")
    if not f.coeffs or all(c == 0.0 for c in f.coeffs):
        return 0.0
    idx = np.arange(f.lo, f.hi + 1, dtype=np.int64)
    return float(f.evaluate_many(idx) @ a.read_block(f.lo, f.hi + 1))


def absolute_term_sum(a, f: RangePolynomial) -> float:
    """``sum |f(i) * a_i|``: the natural scale for relative comparisons."""
    if f.lo < 0 or f.hi >= len(a):
        raise BoundsError(f"range [{f.lo}, {f.hi}] outside array of length {len(a)}")
    idx = np.arange(f.lo, f.hi + 1, dtype=np.int64)
    return float(np.abs(f.evaluate_many(idx) * a.read_block(f.lo, f.hi + 1)).sum())


def brute_max(a, lo: int, hi: int) -> float:
    """O(n) oracle for range maxima."""
    if lo > hi or lo < 0 or hi >= len(a):
        raise BoundsError(f"bad range [{lo}, {hi}] for array of length {len(a)}")
    return float(a.read_block(lo, hi + 1).max())


def brute_moments(a, lo: int, hi: int, m: int, anchor: int | None = None) -> MomentTuple:
    """O(n) oracle for moment tuples over ``[lo, hi]`` about ``anchor``
    (defaults to ``lo``)."""
    if lo > hi or lo < 0 or hi >= len(a):
        raise BoundsError(f"bad range [{lo}, {hi}] for array of length {len(a)}")
    if anchor is None:
        anchor = lo
    block = a.read_block(lo, hi + 1)
    offs = np.arange(lo, hi + 1, dtype=np.float64) - anchor
    values = [float(hi - lo + 1)]
    for k in range(m - 1):
        values.append(float((offs ** k) @ block))
    return MomentTuple(tuple(values), anchor)
