"""Overlapped bin buffering with interpolation coefficients.

One real-valued buffer of ``n/b + 1`` components answers every
polynomial-weight range query of degree < N. Component k is a weighted
sum over the N bins surrounding position ``k*b``; because the weights
reproduce polynomials of degree N-1 and vanish at node positions, a
query needs only (a) a coarse sweep over the buffer, and (b) correction
sweeps confined to small windows around the two range endpoints.

The buffer is hierarchical: buffering the buffer with the same weights
stores scale-(s+1) values in place at component indices divisible by
``b**s``. ``beta`` counts the aggregation passes; it is chosen so the
top scale is swept in O(N) terms. Updates walk the "computed-from" dag
one scale at a time through a sparse delta map, touching at most 2N
cells per scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .core import RangePolynomial
from .errors import BoundsError, ParameterError
from .lagrange import LagrangeTable, lagrange_table, _centered_bins


@dataclass
class QueryStats:
    """Access counters for one query."""

    external_reads: int = 0
    buffer_reads: int = 0


@dataclass
class UpdateStats:
    """Footprint counters for one update: buffer cells written, and the
    delta-map population at the start of each scale pass."""

    cells_modified: int = 0
    live_keys_per_scale: list = field(default_factory=list)

    @property
    def max_live_keys(self) -> int:
        return max(self.live_keys_per_scale, default=0)


@dataclass
class OlaBuffer:
    """Flat overlapped buffer with in-place hierarchical scales.

    ``components[i]`` physically holds the value of the highest scale
    that claims index i: scale s+1 occupies indices divisible by b**s,
    up to the top scale beta+1.
    """

    n: int
    b: int
    order: int  # N: number of buffered moments, even; overlaps are N/2 each side
    beta: int
    components: np.ndarray
    table: LagrangeTable

    def query(self, a, f: RangePolynomial, stats: QueryStats | None = None) -> float:
        return ola_query(a, self, f, stats)

    def update(self, j: int, delta: float, stats: UpdateStats | None = None) -> None:
        ola_update(self, j, delta, stats)


def scale_count(n: int, b: int, order: int) -> int:
    """Largest beta with n / b**beta >= order."""
    beta = 0
    while n >= order * b ** (beta + 1):
        beta += 1
    return beta


def _validate_params(n: int, b: int, order: int) -> None:
    if b < 2:
        raise ParameterError(f"bin size must be at least 2, got {b}")
    if order < 2 or order % 2 != 0:
        raise ParameterError(f"moment budget must be even and >= 2, got {order}")
    if n < order * b:
        raise ParameterError(
            f"array of length {n} too small for one scale (need >= {order * b})"
        )


def onestep(src, s: int, table: LagrangeTable) -> np.ndarray:
    """One buffering pass over ``src`` read at stride ``b**s``.

    Output component k is ``sum_j c_j * src[(k*b + j) * b**s]`` with
    out-of-range sources treated as zero; the output has
    ``len(src) // b**(s+1) + 1`` components.
    """
    b = table.b
    src = np.asarray(src, dtype=np.float64)
    view = src[:: b ** s]
    out_len = src.shape[0] // b ** (s + 1) + 1
    return K.onestep(view, b, table.left, table.flat, table.offset, out_len)


def compute_buffer(a, b: int, order: int) -> OlaBuffer:
    """Build the buffer in one pass over the array plus one pass per scale
    over the (much smaller) buffer itself."""
    n = len(a)
    _validate_params(n, b, order)
    table = lagrange_table(b, order // 2, order // 2)
    beta = scale_count(n, b, order)

    flat = onestep(a.read_block(0, n), 0, table)
    for s in range(beta):
        nxt = onestep(flat, s, table)
        stride = b ** (s + 1)
        writable = (flat.shape[0] - 1) // stride + 1
        flat[::stride] = nxt[:writable]
    return OlaBuffer(n, b, order, beta, flat, table)


def candidates(size: int, s: int, p: int, q: int, b: int, order: int) -> np.ndarray:
    """Indices (at scale s) where endpoint corrections may be nonzero:
    the union of two windows of ``order`` bins around p's and q's bins,
    clamped to ``[0, size)`` and deduplicated."""
    out = []
    for lo, hi in _candidate_windows(size, s, p, q, b, order):
        out.append(np.arange(lo, hi, dtype=np.int64))
    if not out:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(out)


def _candidate_windows(size: int, s: int, p: int, q: int,
                       b: int, order: int) -> list[tuple[int, int]]:
    """Half-open, clamped, merged index windows around both endpoints."""
    half = order // 2
    node_span = b ** (s + 1)
    wins = []
    for e in (p, q):
        base = e // node_span
        lo = max((base - half) * b, 0)
        hi = min((base + half) * b, size)
        if lo < hi:
            wins.append((lo, hi))
    return _merge_windows(wins)


def _merge_windows(wins: list[tuple[int, int]]) -> list[tuple[int, int]]:
    wins = sorted(wins)
    merged: list[tuple[int, int]] = []
    for lo, hi in wins:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _query_checks(buf: OlaBuffer, f: RangePolynomial) -> None:
    if f.degree > buf.order - 1:
        raise ParameterError(
            f"degree {f.degree} not reproducible by an order-{buf.order} buffer; "
            f"rebuild with a larger moment budget"
        )
    if f.lo < 0 or f.hi >= buf.n:
        raise BoundsError(f"range [{f.lo}, {f.hi}] outside array of length {buf.n}")


def _buffer_side_sum(buf: OlaBuffer, f: RangePolynomial,
                     fcoef: np.ndarray, stats: QueryStats | None) -> float:
    """Correction sweeps over scales 1..beta plus the top coarse sweep."""
    b, order = buf.b, buf.order
    table = buf.table
    flat = buf.components
    total = 0.0
    for s in range(1, buf.beta + 1):
        stride = b ** (s - 1)
        view = flat[::stride]
        for lo, hi in _candidate_windows(view.shape[0], s, f.lo, f.hi, b, order):
            if stats is not None:
                stats.buffer_reads += hi - lo
            total += K.delta_window_sum(
                view, 0, lo, hi, b, order // 2, table.flat, table.offset,
                b ** s, b ** (s + 1), f.lo, f.hi, fcoef,
            )
    top = flat[:: b ** buf.beta]
    if stats is not None:
        stats.buffer_reads += top.shape[0]
    total += K.coarse_sweep(top, b ** (buf.beta + 1), f.lo, f.hi, fcoef)
    return total


def ola_query(a, buf: OlaBuffer, f: RangePolynomial,
              stats: QueryStats | None = None) -> float:
    """Exact ``sum f(i) * a_i`` from the buffer plus two endpoint windows
    of external reads (each at most ``order * b`` wide)."""
    _query_checks(buf, f)
    fcoef = np.asarray(f.coeffs, dtype=np.float64)
    total = _buffer_side_sum(buf, f, fcoef, stats)
    table = buf.table
    for lo, hi in _candidate_windows(buf.n, 0, f.lo, f.hi, buf.b, buf.order):
        block = a.read_block(lo, hi)
        if stats is not None:
            stats.external_reads += hi - lo
        total += K.delta_window_sum(
            block, lo, lo, hi, buf.b, buf.order // 2, table.flat, table.offset,
            1, buf.b, f.lo, f.hi, fcoef,
        )
    return float(total)


def approx_query(a, buf: OlaBuffer, f: RangePolynomial,
                 bins_per_endpoint: int) -> tuple[float, int]:
    """Progressive estimate: full buffer sweep, but external corrections
    restricted to ``bins_per_endpoint`` bins centered on each endpoint's
    bin. Returns ``(value, external_reads_used)``.

    0 bins reads nothing external; the maximum (order - 1) applies the
    complete correction windows and matches ``ola_query`` exactly.
    """
    if not 0 <= bins_per_endpoint <= buf.order - 1:
        raise ParameterError(
            f"bins_per_endpoint must be in [0, {buf.order - 1}], got {bins_per_endpoint}"
        )
    _query_checks(buf, f)
    fcoef = np.asarray(f.coeffs, dtype=np.float64)
    total = _buffer_side_sum(buf, f, fcoef, None)

    b = buf.b
    if bins_per_endpoint == buf.order - 1:
        wins = _candidate_windows(buf.n, 0, f.lo, f.hi, b, buf.order)
    else:
        allowed = set()
        for e in (f.lo, f.hi):
            allowed |= _centered_bins(e // b, bins_per_endpoint)
        raw = []
        for k in sorted(allowed):
            lo = max(k * b, 0)
            hi = min((k + 1) * b, buf.n)
            if lo < hi:
                raw.append((lo, hi))
        wins = _merge_windows(raw)

    reads = 0
    table = buf.table
    for lo, hi in wins:
        block = a.read_block(lo, hi)
        reads += hi - lo
        total += K.delta_window_sum(
            block, lo, lo, hi, b, buf.order // 2, table.flat, table.offset,
            1, b, f.lo, f.hi, fcoef,
        )
    return float(total), reads


def ola_update(buf: OlaBuffer, j: int, delta: float,
               stats: UpdateStats | None = None) -> None:
    """Propagate ``a[j] += delta`` through the buffer (the array itself is
    the caller's to update).

    A sparse map carries pending increments from scale to scale: a key
    is an array-space position; at pass s every key whose largest scale
    is s is folded into its buffer cell and spread over the N
    surrounding scale-(s+1) node positions. Keys that outlive all passes
    belong to the top scale and flush directly.
    """
    n, b, order, beta = buf.n, buf.b, buf.order, buf.beta
    if not 0 <= j < n:
        raise BoundsError(f"index {j} outside array of length {n}")
    flat = buf.components
    limit = flat.shape[0]
    table = buf.table
    half = order // 2
    deltas: dict[int, float] = {j: float(delta)}

    for s in range(beta + 1):
        bs = b ** s
        bs1 = bs * b
        if stats is not None:
            stats.live_keys_per_scale.append(len(deltas))
        for i in sorted(deltas):
            r = (i // bs) % b
            if r == 0:
                continue  # i also lives at scale s+1; defer
            d = deltas.pop(i)
            base = i // bs1
            for m in range(-half + 1, half + 1):
                pos = (base + m) * bs1
                if pos < 0 or pos // b >= limit:
                    continue
                deltas[pos] = deltas.get(pos, 0.0) + table.coefficient(r - m * b) * d
            if i % b == 0:
                flat[i // b] += d
                if stats is not None:
                    stats.cells_modified += 1
    if stats is not None:
        stats.live_keys_per_scale.append(len(deltas))
    for i in sorted(deltas):
        flat[i // b] += deltas[i]
        if stats is not None:
            stats.cells_modified += 1
    deltas.clear()
