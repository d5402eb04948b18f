"""Prefix-sum baselines for cross-checking range sums and update costs.

PS answers any range sum with one subtraction but pays O(n) per update.
RPS restarts the prefix sums every ``block`` elements and keeps an
overlay of cumulative block totals, trading the update cost down to
O(block + n/block) for two extra reads per query.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundsError


@dataclass
class PrefixSumBuffer:
    sums: np.ndarray

    @classmethod
    def build(cls, a) -> "PrefixSumBuffer":
        return cls(np.cumsum(a.read_block(0, len(a))))

    def query(self, k: int, l: int) -> float:
        n = self.sums.shape[0]
        if not (0 <= k <= l < n):
            raise BoundsError(f"bad range [{k}, {l}] for array of length {n}")
        head = self.sums[k - 1] if k > 0 else 0.0
        return float(self.sums[l] - head)

    def update(self, j: int, delta: float) -> int:
        """Returns the number of buffer entries rewritten (n - j)."""
        n = self.sums.shape[0]
        if not 0 <= j < n:
            raise BoundsError(f"index {j} outside array of length {n}")
        self.sums[j:] += delta
        return n - j


@dataclass
class RelativePrefixSumBuffer:
    block: int
    local: np.ndarray    # prefix sums restarted at every block boundary
    overlay: np.ndarray  # cumulative totals of whole blocks
    touches: int = field(default=0)

    @classmethod
    def build(cls, a, block: int | None = None) -> "RelativePrefixSumBuffer":
        n = len(a)
        if block is None:
            block = max(2, math.isqrt(n - 1) + 1) if n > 1 else 2
        data = a.read_block(0, n)
        local = np.empty(n, dtype=np.float64)
        nb = (n + block - 1) // block
        totals = np.empty(nb, dtype=np.float64)
        for g in range(nb):
            lo, hi = g * block, min((g + 1) * block, n)
            local[lo:hi] = np.cumsum(data[lo:hi])
            totals[g] = local[hi - 1]
        return cls(block, local, np.cumsum(totals))

    def _prefix(self, i: int) -> float:
        g = i // self.block
        head = self.overlay[g - 1] if g > 0 else 0.0
        return float(self.local[i] + head)

    def query(self, k: int, l: int) -> float:
        n = self.local.shape[0]
        if not (0 <= k <= l < n):
            raise BoundsError(f"bad range [{k}, {l}] for array of length {n}")
        head = self._prefix(k - 1) if k > 0 else 0.0
        return self._prefix(l) - head

    def update(self, j: int, delta: float) -> int:
        """Patch local sums within j's block and the overlay beyond it;
        returns (and accumulates) the number of entries touched."""
        n = self.local.shape[0]
        if not 0 <= j < n:
            raise BoundsError(f"index {j} outside array of length {n}")
        g = j // self.block
        hi = min((g + 1) * self.block, n)
        self.local[j:hi] += delta
        self.overlay[g:] += delta
        touched = (hi - j) + (self.overlay.shape[0] - g)
        self.touches += touched
        return touched


def ps_build(a) -> PrefixSumBuffer:
    return PrefixSumBuffer.build(a)


def ps_query(buf: PrefixSumBuffer, k: int, l: int) -> float:
    return buf.query(k, l)


def ps_update(buf: PrefixSumBuffer, j: int, delta: float) -> int:
    return buf.update(j, delta)


def rps_build(a, block: int | None = None) -> RelativePrefixSumBuffer:
    return RelativePrefixSumBuffer.build(a, block)


def rps_query(buf: RelativePrefixSumBuffer, k: int, l: int) -> float:
    return buf.query(k, l)


def rps_update(buf: RelativePrefixSumBuffer, j: int, delta: float) -> int:
    return buf.update(j, delta)
