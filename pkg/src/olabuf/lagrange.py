"""Interpolation coefficient tables for overlapped bin buffering.

A table holds the weights ``c_j`` on support ``[-M*b, M'*b)`` such that
for any polynomial f of degree at most M+M'-1,

    f(i) == sum_k f(k*b) * c_{i - k*b}        (nodes k*b, M+M' per point)

with the node window ``k in [floor(i/b) - M' + 1, floor(i/b) + M]``. The
weights come from the Lagrange basis evaluated at offset r/b, so they
also satisfy ``c_{l*b} == (l == 0)``, which keeps node positions
untouched by correction sweeps and makes in-place hierarchies possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import RangePolynomial
from .errors import ParameterError


@dataclass(frozen=True)
class LagrangeTable:
    """Coefficients ``c_j`` for j in ``[-left*b, right*b)``.

    ``flat[j + left*b]`` stores ``c_j``; ``entry(k, r)`` views the same
    data as the matrix ``c_{r - k*b}`` with ``k in [-right+1, left]`` and
    ``r in [0, b)``.
    """

    b: int
    left: int   # M: overlap bins to the left of a component's own bin
    right: int  # M': overlap bins to the right
    flat: np.ndarray

    @property
    def support(self) -> int:
        """Number of interpolation nodes, M + M'."""
        return self.left + self.right

    @property
    def node_range(self) -> range:
        """Relative node offsets k used around any index (inclusive ends)."""
        return range(-self.right + 1, self.left + 1)

    @property
    def offset(self) -> int:
        return self.left * self.b

    def coefficient(self, j: int) -> float:
        """``c_j``, zero outside the support."""
        j += self.offset
        if 0 <= j < self.flat.shape[0]:
            return float(self.flat[j])
        return 0.0

    def entry(self, k: int, r: int) -> float:
        return self.coefficient(r - k * self.b)


@lru_cache(maxsize=64)
def lagrange_table(b: int, left: int, right: int) -> LagrangeTable:
    """Build the degree ``left + right - 1`` coefficient table.

    Entry (k, r) is the Lagrange basis polynomial for node k (among the
    nodes -right+1 .. left) evaluated at r/b:

        c_{r - k*b} = prod_{m != k} (r/b - m) / (k - m)

    Tables are cached per (b, left, right); treat the returned object
    (including its coefficient array) as read-only.
    """
    if b < 2:
        raise ParameterError(f"bin size must be at least 2, got {b}")
    if left < 0 or right < 0 or left + right < 1:
        raise ParameterError(f"bad overlaps M={left}, M'={right}")
    flat = np.zeros((left + right) * b, dtype=np.float64)
    nodes = range(-right + 1, left + 1)
    for r in range(b):
        x = r / b
        for k in nodes:
            prod = 1.0
            for m in nodes:
                if m != k:
                    prod *= (x - m) / (k - m)
            flat[r - k * b + left * b] = prod
    return LagrangeTable(b, left, right, flat)


def interpolant_h(f: RangePolynomial, table: LagrangeTable, i: int) -> float:
    """Bin-wise interpolant of f at integer i:
    ``h(i) = sum_k f(k*b) * c_{i - k*b}`` over the node window of i's bin.

    h reproduces f exactly wherever f is a single polynomial of degree
    < support across the window; it agrees with f at every node.
    """
    b = table.b
    base = i // b
    acc = 0.0
    for k in table.node_range:
        acc += f((base + k) * b) * table.coefficient(i - (base + k) * b)
    return acc


def interpolant_h_many(f: RangePolynomial, table: LagrangeTable, idx: np.ndarray) -> np.ndarray:
    """Vectorized ``interpolant_h`` over an integer index array."""
    idx = np.asarray(idx, dtype=np.int64)
    b = table.b
    base = idx // b
    r = idx - base * b
    acc = np.zeros(idx.shape, dtype=np.float64)
    for k in table.node_range:
        coefs = table.flat[r - k * b + table.offset]
        acc += f.evaluate_many((base + k) * b) * coefs
    return acc


def error_mass_profile(table: LagrangeTable, f: RangePolynomial) -> dict[int, float]:
    """Per-bin interpolation error mass ``sum_{i in bin} |f(i) - h(i)|``
    around each endpoint of f's support.

    Bins outside the two windows carry no error: away from the
    endpoints f is a single polynomial over every node window, so h
    reproduces it. Returns an ordered ``{bin_index: mass}`` map covering
    a window of ``support`` bins either side of each endpoint bin.
    """
    b = table.b
    reach = table.support
    bins: dict[int, float] = {}
    for edge in (f.lo, f.hi):
        center = edge // b
        for k in range(center - reach, center + reach + 1):
            if k in bins:
                continue
            idx = np.arange(k * b, (k + 1) * b, dtype=np.int64)
            h = interpolant_h_many(f, table, idx)
            exact = f.evaluate_many(idx)
            bins[k] = float(np.abs(exact - h).sum())
    return dict(sorted(bins.items()))


def endpoint_error_fraction(table: LagrangeTable, f: RangePolynomial,
                            endpoint: int, bins_used: int) -> float:
    """Fraction of one endpoint's error mass covered by ``bins_used``
    bins centered on the endpoint's bin."""
    b = table.b
    center = endpoint // b
    masses = error_mass_profile(table, f)
    reach = table.support
    window = {k: m for k, m in masses.items() if abs(k - center) <= reach}
    total = sum(window.values())
    if total == 0.0:
        return 1.0
    covered = sum(m for k, m in window.items()
                  if k in _centered_bins(center, bins_used))
    return covered / total


def _centered_bins(center: int, count: int) -> set[int]:
    """The first ``count`` bins in the order center, left, right, ..."""
    out: set[int] = set()
    offsets = [0]
    d = 1
    while len(offsets) < count:
        offsets.append(-d)
        if len(offsets) < count:
            offsets.append(d)
        d += 1
    for off in offsets[:count]:
        out.add(center + off)
    return out
