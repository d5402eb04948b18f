#!/usr/bin/env python3
"""Time the numba kernels against the pure-numpy fallback.

Runs buffer construction, a query batch and an update batch with each
backend on the same synthetic data, checks that the two backends agree,
and prints a timing table. Select the default backend for library use
with the OLABUF_BACKEND environment variable.

Usage: python benchmarks/backend_compare.py [--n 4194304] [--trials 500]
"""

import argparse
import time

import numpy as np

from olabuf import _kernels
from olabuf.cli import SplitMix64, sample_range
from olabuf.ola import compute_buffer, ola_query, ola_update
from olabuf.core import range_sum
from olabuf.storage import VirtualSineArray


def bind(name: str) -> None:
    impl = _kernels.get_backend(name)
    _kernels.onestep = impl.onestep
    _kernels.delta_window_sum = impl.delta_window_sum
    _kernels.coarse_sweep = impl.coarse_sweep
    impl.warmup()


def run(name: str, n: int, b: int, order: int, trials: int, seed: int):
    bind(name)
    a = VirtualSineArray(n)

    t0 = time.perf_counter()
    buf = compute_buffer(a, b, order)
    t_build = time.perf_counter() - t0

    rng = SplitMix64(seed)
    ranges = [sample_range(rng, n) for _ in range(trials)]
    t0 = time.perf_counter()
    values = [ola_query(a, buf, range_sum(p, q)) for p, q in ranges]
    t_query = (time.perf_counter() - t0) / trials

    t0 = time.perf_counter()
    for i in range(trials):
        ola_update(buf, rng.below(n), 1e-9)
    t_update = (time.perf_counter() - t0) / trials
    return t_build, t_query, t_update, np.array(values)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=2 ** 22)
    parser.add_argument("--bin-size", type=int, default=128)
    parser.add_argument("--moments", type=int, default=4)
    parser.add_argument("--trials", type=int, default=500)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    results = {}
    for name in ("numpy", "numba"):
        try:
            results[name] = run(name, args.n, args.bin_size, args.moments,
                                args.trials, args.seed)
        except ImportError:
            print(f"{name}: unavailable, skipped")

    if len(results) == 2:
        err = np.max(np.abs(results["numba"][3] - results["numpy"][3]))
        print(f"max |numba - numpy| over {args.trials} query values: {err:.3e}")

    print(f"\nn={args.n} b={args.bin_size} N={args.moments} trials={args.trials}")
    print(f"{'backend':>8} {'build (s)':>12} {'query (us)':>12} {'update (us)':>12}")
    for name, (tb, tq, tu, _) in results.items():
        print(f"{name:>8} {tb:12.4f} {tq * 1e6:12.1f} {tu * 1e6:12.1f}")


if __name__ == "__main__":
    main()
