"""Command-line harness: build, persist, query and update buffers, and
run deterministic benchmark sweeps as CSV.

Buffer file format (all integers little-endian):

    magic   4 bytes  b"OLAB"
    version u32      1
    n       u64      source array length
    b       u64      bin size
    N       u32      buffered moment count (even)
    beta    u32      hierarchy depth, must equal the derived value
    payload (n // b + 1) little-endian IEEE-754 doubles

Exit codes: 0 success, 2 parameter error, 3 I/O or file-format error,
4 bounds error.
"""

from __future__ import annotations

import argparse
import csv
import struct
import sys
import time

import numpy as np

from .baselines import PrefixSumBuffer, RelativePrefixSumBuffer
from .core import RangePolynomial, range_sum
from .errors import BoundsError, ParameterError
from .lagrange import endpoint_error_fraction, lagrange_table
from .ola import (OlaBuffer, QueryStats, UpdateStats, approx_query,
                  compute_buffer, ola_query, ola_update, scale_count)
from .storage import CountingArray, FileArray, VirtualSineArray

_MAGIC = b"OLAB"
_VERSION = 1
_HEADER = struct.Struct("<4sIQQII")


class BufferFileError(OSError):
    """The file is not a valid buffer image."""


def write_buffer_file(path, buf: OlaBuffer) -> None:
    payload = np.ascontiguousarray(buf.components, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, buf.n, buf.b, buf.order, buf.beta))
        fh.write(payload.tobytes())


def read_buffer_file(path) -> OlaBuffer:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise BufferFileError(f"{path}: truncated header")
        magic, version, n, b, order, beta = _HEADER.unpack(head)
        if magic != _MAGIC:
            raise BufferFileError(f"{path}: bad magic {magic!r}")
        if version != _VERSION:
            raise BufferFileError(f"{path}: unsupported version {version}")
        if order < 2 or order % 2 != 0:
            raise BufferFileError(f"{path}: moment count {order} must be even")
        if b < 2 or beta != scale_count(n, b, order):
            raise BufferFileError(f"{path}: inconsistent geometry (n={n}, b={b}, beta={beta})")
        expect = n // b + 1
        payload = fh.read()
    components = np.frombuffer(payload, dtype="<f8")
    if components.shape[0] != expect:
        raise BufferFileError(
            f"{path}: payload holds {components.shape[0]} components, expected {expect}"
        )
    table = lagrange_table(b, order // 2, order // 2)
    return OlaBuffer(n, b, order, beta, components.astype(np.float64), table)


class SplitMix64:
    """Tiny deterministic 64-bit generator (splitmix64 finalizer).

    Used for all benchmark sampling so CSV output is reproducible from
    the seed alone. ``below(n)`` takes the output modulo n; the bias is
    negligible for the sizes involved and keeps the stream simple.
    """

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int) -> None:
        self._state = seed & self._MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & self._MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        return self.next_u64() % n

    def uniform(self) -> float:
        return self.next_u64() / 2.0 ** 64


def sample_range(rng: SplitMix64, n: int) -> tuple[int, int]:
    """Two uniform draws in [0, n); the interval is [min, max), returned
    with an inclusive upper end. Empty draws are rejected."""
    while True:
        x, y = rng.below(n), rng.below(n)
        if x != y:
            return min(x, y), max(x, y) - 1


def _open_source(args):
    if args.virtual_sin:
        if args.n is None:
            raise ParameterError("--virtual-sin needs --n")
        return VirtualSineArray(args.n)
    if args.file:
        return FileArray(args.file, dtype="<f4" if args.float32 else "<f8")
    raise ParameterError("no array source given (use --virtual-sin or --file)")


def _add_source_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--virtual-sin", action="store_true",
                   help="use the synthetic a_i = sin(i) array")
    p.add_argument("--n", type=int, help="length of the virtual array")
    p.add_argument("--file", help="raw packed little-endian doubles")
    p.add_argument("--float32", action="store_true",
                   help="treat --file as packed little-endian 32-bit floats")


def cmd_build(args) -> int:
    source = CountingArray(_open_source(args))
    t0 = time.perf_counter_ns()
    buf = compute_buffer(source, args.bin_size, args.moments)
    elapsed = time.perf_counter_ns() - t0
    write_buffer_file(args.out, buf)
    print(f"components={buf.components.shape[0]} beta={buf.beta} "
          f"reads={source.reads} writes={source.writes} elapsed_ns={elapsed}")
    return 0


def cmd_query(args) -> int:
    buf = read_buffer_file(args.buffer)
    source = CountingArray(_open_source(args))
    if len(source) != buf.n:
        raise ParameterError(f"array length {len(source)} != buffer n {buf.n}")
    coeffs = tuple(float(c) for c in args.poly.split(","))
    f = RangePolynomial(args.range[0], args.range[1], coeffs)
    stats = QueryStats()
    value = ola_query(source, buf, f, stats)
    print(f"value={value!r} external_reads={source.reads} "
          f"buffer_reads={stats.buffer_reads}")
    return 0


def cmd_update(args) -> int:
    buf = read_buffer_file(args.buffer)
    stats = UpdateStats()
    ola_update(buf, args.index, args.delta, stats)
    write_buffer_file(args.buffer, buf)
    print(f"cells_modified={stats.cells_modified} "
          f"max_live_keys={stats.max_live_keys}")
    return 0


_CSV_COLUMNS = ["mode", "n", "b", "N", "trial", "external_reads",
                "buffer_reads", "cells_modified", "wall_ns",
                "bins_per_endpoint", "error_fraction"]


def cmd_bench(args) -> int:
    writer = csv.writer(sys.stdout)
    writer.writerow(_CSV_COLUMNS)
    if args.trials <= 0:
        return 0
    bins = [int(x) for x in args.bin_size.split(",")]
    orders = [int(x) for x in args.moments.split(",")]
    n = args.n
    for b in bins:
        for order in orders:
            rng = SplitMix64(args.seed)
            row = _BenchRow(writer, args.mode, n, b, order)
            if args.mode == "construction":
                _bench_construction(row, n, b, order, args.trials)
            elif args.mode == "query":
                _bench_query(row, rng, n, b, order, args.trials)
            elif args.mode == "update":
                _bench_update(row, rng, n, b, order, args.trials)
            elif args.mode == "approx":
                _bench_approx(row, n, b, order)
            elif args.mode == "baseline":
                _bench_baseline(row, rng, n, b, args.trials)
    return 0


class _BenchRow:
    def __init__(self, writer, mode, n, b, order):
        self.writer = writer
        self.fixed = [mode, n, b, order]

    def emit(self, trial, external_reads, buffer_reads, cells_modified,
             wall_ns, bins_per_endpoint="", error_fraction=""):
        self.writer.writerow(self.fixed + [trial, external_reads, buffer_reads,
                                           cells_modified, wall_ns,
                                           bins_per_endpoint, error_fraction])


def _bench_construction(row, n, b, order, trials):
    for trial in range(trials):
        source = CountingArray(VirtualSineArray(n))
        t0 = time.perf_counter_ns()
        buf = compute_buffer(source, b, order)
        wall = time.perf_counter_ns() - t0
        row.emit(trial, source.reads, 0, buf.components.shape[0], wall)


def _bench_query(row, rng, n, b, order, trials):
    source = CountingArray(VirtualSineArray(n))
    buf = compute_buffer(source, b, order)
    for trial in range(trials):
        p, q = sample_range(rng, n)
        source.reset()
        stats = QueryStats()
        t0 = time.perf_counter_ns()
        ola_query(source, buf, range_sum(p, q), stats)
        wall = time.perf_counter_ns() - t0
        row.emit(trial, source.reads, stats.buffer_reads, 0, wall)


def _bench_update(row, rng, n, b, order, trials):
    source = VirtualSineArray(n)
    buf = compute_buffer(source, b, order)
    for trial in range(trials):
        j = rng.below(n)
        delta = 2.0 * rng.uniform() - 1.0
        stats = UpdateStats()
        t0 = time.perf_counter_ns()
        ola_update(buf, j, delta, stats)
        wall = time.perf_counter_ns() - t0
        row.emit(trial, 0, 0, stats.cells_modified, wall)


def _bench_approx(row, n, b, order):
    """Error-mass fractions for a step weight with mid-bin endpoints,
    swept over the number of correction bins used per endpoint."""
    table = lagrange_table(b, order // 2, order // 2)
    source = VirtualSineArray(n)
    buf = compute_buffer(source, b, order)
    nb = n // b
    if nb < 4 * order + 3:
        raise ParameterError(f"--n too small for the approx sweep at b={b}, N={order}")
    p = 2 * order * b + b // 2
    q = (nb - 2 * order - 1) * b + b // 2
    f = range_sum(p, q)
    for t in range(order):
        frac = endpoint_error_fraction(table, f, p, t)
        t0 = time.perf_counter_ns()
        _, reads = approx_query(source, buf, f, t)
        wall = time.perf_counter_ns() - t0
        row.emit(0, reads, 0, 0, wall, t, f"{frac:.6f}")


def _bench_baseline(row, rng, n, b, trials):
    source = VirtualSineArray(n)
    ps = PrefixSumBuffer.build(source)
    rps = RelativePrefixSumBuffer.build(source)
    for trial in range(trials):
        p, q = sample_range(rng, n)
        t0 = time.perf_counter_ns()
        got = rps.query(p, q)
        wall = time.perf_counter_ns() - t0
        want = ps.query(p, q)
        if abs(got - want) > 1e-9 * max(abs(want), 1.0):
            raise ParameterError(f"baseline mismatch at [{p}, {q}]: {got} vs {want}")
        j = rng.below(n)
        delta = 2.0 * rng.uniform() - 1.0
        touched = rps.update(j, delta)
        ps.update(j, delta)
        row.emit(trial, 0, 4, touched, wall)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="olabuf",
        description="Buffered range sums and local moments over large arrays",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="precompute a buffer and write it to disk")
    _add_source_args(p)
    p.add_argument("--bin-size", type=int, required=True)
    p.add_argument("--moments", type=int, required=True,
                   help="even number of buffered moments (N)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="answer a polynomial range query")
    p.add_argument("buffer")
    _add_source_args(p)
    p.add_argument("--range", type=int, nargs=2, required=True, metavar=("P", "Q"))
    p.add_argument("--poly", default="1",
                   help="comma-separated coefficients about x=P (default: range sum)")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("update", help="apply a point increment to a stored buffer")
    p.add_argument("buffer")
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=cmd_update)

    p = sub.add_parser("bench", help="deterministic benchmark sweeps as CSV")
    p.add_argument("--mode", required=True,
                   choices=["construction", "query", "update", "approx", "baseline"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bin-size", default="128", help="comma-separated list")
    p.add_argument("--moments", default="4", help="comma-separated list")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=2024)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BoundsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
