"""Classical and hierarchical bin buffering for SUM, MAX and moment tuples.

A bin buffer holds one aggregate per bin of ``b`` consecutive elements.
Range queries stitch together a head fragment, whole-bin aggregates and
a tail fragment; hierarchical buffers additionally aggregate runs of
``b`` buffer slots into higher scales, stored *in place* at slot indices
divisible by powers of ``b`` when the aggregate is invertible (an
overwritten slot value is recoverable by subtracting its siblings from
the group aggregate). Non-invertible kinds (MAX) keep each scale in its
own array instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MomentTuple, QueryKind, f_merge, recenter
from .errors import BoundsError, ParameterError


@dataclass
class QueryTrace:
    """Aggregation-term instrumentation for queries.

    ``terms`` counts the operands folded: one per buffer value used (at
    any scale) and one per element-range fragment.
    """

    terms: int = 0


def _g_range(kind: QueryKind, a, lo: int, hi: int):
    """Aggregate of ``a[lo..hi]``; moment tuples are anchored at ``lo``."""
    block = a.read_block(lo, hi + 1)
    if kind.tag == "sum":
        return float(block.sum())
    if kind.tag == "max":
        return float(block.max())
    offs = np.arange(hi - lo + 1, dtype=np.float64)
    values = [float(hi - lo + 1)]
    for k in range(kind.order_count - 1):
        values.append(float((offs ** k) @ block))
    return MomentTuple(tuple(values), lo)


def _merge(kind: QueryKind, x, y):
    """Combine aggregates of adjacent ranges, left range first."""
    if kind.tag == "sum":
        return x + y
    if kind.tag == "max":
        return x if x >= y else y
    return f_merge(x, y)


def _fold(kind: QueryKind, parts):
    acc = None
    for part in parts:
        acc = part if acc is None else _merge(kind, acc, part)
    if acc is None:
        raise ParameterError("nothing to aggregate")
    return acc


def _invert_left(kind: QueryKind, z, rest):
    """Solve ``z = merge(x, rest)`` for the leading operand x."""
    if kind.tag == "sum":
        return z - rest
    if kind.tag == "moments":
        shifted = recenter(rest, z.anchor)
        return MomentTuple(
            tuple(a - b for a, b in zip(z.values, shifted.values)), z.anchor
        )
    raise ParameterError(f"{kind} is not invertible")


def _delta_aggregate(kind: QueryKind, j: int, delta: float, anchor: int):
    """Change in an aggregate when element j grows by delta.

    COUNT is unchanged (no element was added or removed); moment k grows
    by ``delta * (j - anchor)**k``.
    """
    if kind.tag == "sum":
        return delta
    offs = float(j - anchor)
    return MomentTuple(
        (0.0,) + tuple(delta * offs ** k for k in range(kind.order_count - 1)),
        anchor,
    )


@dataclass
class BinBuffer:
    """One aggregate per bin; queries cost O(n/b + b), linear kinds
    update in constant time."""

    kind: QueryKind
    b: int
    n: int
    components: list

    @classmethod
    def build(cls, a, kind: QueryKind, b: int) -> "BinBuffer":
        if b < 2:
            raise ParameterError(f"bin size must be at least 2, got {b}")
        n = len(a)
        comps = [
            _g_range(kind, a, k * b, min((k + 1) * b, n) - 1)
            for k in range((n + b - 1) // b)
        ]
        return cls(kind, b, n, comps)

    def _bin_end(self, k: int) -> int:
        return min((k + 1) * self.b, self.n) - 1

    def query(self, a, k: int, l: int, trace: QueryTrace | None = None):
        if not (0 <= k <= l < self.n):
            raise BoundsError(f"bad range [{k}, {l}] for array of length {self.n}")
        b = self.b
        first_full = k // b if k % b == 0 else k // b + 1
        last_full = l // b if l == self._bin_end(l // b) else l // b - 1

        parts = []
        if first_full > last_full:
            parts.append(_g_range(self.kind, a, k, l))
        else:
            if k < first_full * b:
                parts.append(_g_range(self.kind, a, k, first_full * b - 1))
            parts.extend(self.components[first_full:last_full + 1])
            if l > self._bin_end(last_full):
                parts.append(_g_range(self.kind, a, (last_full + 1) * b, l))
        if trace is not None:
            trace.terms += len(parts)
        return _fold(self.kind, parts)

    def update(self, a, j: int, delta: float) -> None:
        """Apply ``a[j] += delta`` and patch the buffer to match."""
        if not 0 <= j < self.n:
            raise BoundsError(f"index {j} outside array of length {self.n}")
        a.set(j, a.get(j) + delta)
        k = j // self.b
        if self.kind.linear:
            change = _delta_aggregate(self.kind, j, delta, k * self.b)
            self.components[k] = _merge(self.kind, self.components[k], change)
        else:
            self.components[k] = _g_range(self.kind, a, k * self.b, self._bin_end(k))


def default_scale_count(n: int, b: int) -> int:
    """Largest s with n / b**s >= 2: stop once another aggregation pass
    would leave fewer than two slots at the top."""
    s = 1
    while n >= 2 * b ** (s + 1):
        s += 1
    return s


@dataclass
class HierarchicalBinBuffer:
    """Multi-scale bin buffer with logarithmic queries.

    Scale 1 holds the per-bin aggregates. Scale s holds aggregates of b
    consecutive scale-(s-1) values. For invertible kinds every scale
    lives in the single ``slots`` array: the scale-s value of group g is
    stored at slot ``g * b**(s-1)``, overwriting the scale-(s-1) value
    that used to sit there. For MAX each scale keeps its own array.
    """

    kind: QueryKind
    b: int
    n: int
    scales: int
    slots: list | None = None       # invertible kinds
    levels: list | None = None      # one array per scale otherwise

    @classmethod
    def build(cls, a, kind: QueryKind, b: int,
              scales: int | None = None) -> "HierarchicalBinBuffer":
        if b < 2:
            raise ParameterError(f"bin size must be at least 2, got {b}")
        n = len(a)
        if scales is None:
            scales = default_scale_count(n, b)
        if scales < 1:
            raise ParameterError("need at least one scale")
        base = BinBuffer.build(a, kind, b).components
        if kind.invertible:
            slots = list(base)
            cur = base
            for s in range(2, scales + 1):
                nxt = []
                for g in range((len(cur) + b - 1) // b):
                    nxt.append(_fold(kind, cur[g * b:(g + 1) * b]))
                for g, val in enumerate(nxt):
                    slots[g * b ** (s - 1)] = val
                cur = nxt
            return cls(kind, b, n, scales, slots=slots)
        levels = [list(base)]
        for s in range(2, scales + 1):
            prev = levels[-1]
            levels.append([
                _fold(kind, prev[g * b:(g + 1) * b])
                for g in range((len(prev) + b - 1) // b)
            ])
        return cls(kind, b, n, scales, levels=levels)

    # -- scale geometry -------------------------------------------------

    def _len(self, s: int) -> int:
        """Number of scale-s values."""
        m = (self.n + self.b - 1) // self.b
        for _ in range(s - 1):
            m = (m + self.b - 1) // self.b
        return m

    def _stored_scale(self, slot: int) -> int:
        """The scale whose value physically occupies this slot."""
        s = 1
        x = slot
        while s < self.scales and x % self.b == 0:
            x //= self.b
            s += 1
        return s

    def _scale_value(self, s: int, j: int, trace: QueryTrace | None = None):
        """Scale-s value at scale-s index j, recovering overwritten slots."""
        if self.levels is not None:
            return self.levels[s - 1][j]
        slot = j * self.b ** (s - 1)
        if self._stored_scale(slot) == s:
            return self.slots[slot]
        # slot was overwritten by the scale-(s+1) group aggregate; peel
        # the siblings off it
        g = j // self.b
        z = self._scale_value(s + 1, g)
        sib_lo = g * self.b + 1
        sib_hi = min((g + 1) * self.b, self._len(s)) - 1
        if sib_lo > sib_hi:
            return z  # singleton group: the aggregate is the value itself
        rest = _fold(
            self.kind,
            [self.slots[i * self.b ** (s - 1)] for i in range(sib_lo, sib_hi + 1)],
        )
        return _invert_left(self.kind, z, rest)

    # -- queries ---------------------------------------------------------

    def query(self, a, k: int, l: int, trace: QueryTrace | None = None):
        if not (0 <= k <= l < self.n):
            raise BoundsError(f"bad range [{k}, {l}] for array of length {self.n}")
        b = self.b
        first_full = k // b if k % b == 0 else k // b + 1
        bin_end = min((l // b + 1) * b, self.n) - 1
        last_full = l // b if l == bin_end else l // b - 1

        parts = []
        if first_full > last_full:
            parts.append(_g_range(self.kind, a, k, l))
            if trace is not None:
                trace.terms += 1
        else:
            if k < first_full * b:
                parts.append(_g_range(self.kind, a, k, first_full * b - 1))
                if trace is not None:
                    trace.terms += 1
            parts.append(self._agg_scale(1, first_full, last_full, trace))
            if l >= (last_full + 1) * b:
                parts.append(_g_range(self.kind, a, (last_full + 1) * b, l))
                if trace is not None:
                    trace.terms += 1
        return _fold(self.kind, parts)

    def _agg_scale(self, s: int, lo: int, hi: int, trace: QueryTrace | None):
        """Aggregate scale-s values with indices in [lo, hi], using
        scale s+1 for full groups."""
        b = self.b
        if s == self.scales:
            if trace is not None:
                trace.terms += hi - lo + 1
            return _fold(self.kind, [self._scale_value(s, j) for j in range(lo, hi + 1)])
        length = self._len(s)
        first_full = lo // b if lo % b == 0 else lo // b + 1
        group_end = min((hi // b + 1) * b, length) - 1
        last_full = hi // b if hi == group_end else hi // b - 1

        if first_full > last_full:
            if trace is not None:
                trace.terms += hi - lo + 1
            return _fold(self.kind, [self._scale_value(s, j) for j in range(lo, hi + 1)])
        parts = []
        if lo < first_full * b:
            head = [self._scale_value(s, j) for j in range(lo, first_full * b)]
            if trace is not None:
                trace.terms += len(head)
            parts.extend(head)
        parts.append(self._agg_scale(s + 1, first_full, last_full, trace))
        tail_lo = min((last_full + 1) * b, length)
        if hi >= tail_lo:
            tail = [self._scale_value(s, j) for j in range(tail_lo, hi + 1)]
            if trace is not None:
                trace.terms += len(tail)
            parts.extend(tail)
        return _fold(self.kind, parts)

    # -- updates ---------------------------------------------------------

    def update(self, a, j: int, delta: float) -> None:
        """Apply ``a[j] += delta`` and patch every scale."""
        if not 0 <= j < self.n:
            raise BoundsError(f"index {j} outside array of length {self.n}")
        a.set(j, a.get(j) + delta)
        b = self.b
        if self.kind.linear:
            for s in range(1, self.scales + 1):
                slot = (j // b ** s) * b ** (s - 1)
                if self._stored_scale(slot) == s:
                    change = _delta_aggregate(self.kind, j, delta, slot * b)
                    self.slots[slot] = _merge(self.kind, self.slots[slot], change)
            return
        # MAX: re-aggregate the covering group at every scale
        k = j // b
        self.levels[0][k] = _g_range(self.kind, a, k * b, min((k + 1) * b, self.n) - 1)
        for s in range(2, self.scales + 1):
            g = j // b ** s
            prev = self.levels[s - 2]
            self.levels[s - 1][g] = _fold(self.kind, prev[g * b:(g + 1) * b])


def build(a, kind: QueryKind, b: int) -> BinBuffer:
    return BinBuffer.build(a, kind, b)


def query(buf: BinBuffer, a, k: int, l: int, trace: QueryTrace | None = None):
    return buf.query(a, k, l, trace)


def update(buf: BinBuffer, a, j: int, delta: float) -> None:
    buf.update(a, j, delta)


def build_hier(a, kind: QueryKind, b: int,
               scales: int | None = None) -> HierarchicalBinBuffer:
    return HierarchicalBinBuffer.build(a, kind, b, scales)


def query_hier(buf: HierarchicalBinBuffer, a, k: int, l: int,
               trace: QueryTrace | None = None):
    return buf.query(a, k, l, trace)


def update_hier(buf: HierarchicalBinBuffer, a, j: int, delta: float) -> None:
    buf.update(a, j, delta)
