import numpy as np
import pytest

from olabuf import (BoundsError, CountingArray, MemoryArray, ParameterError,
                    QueryStats, RangePolynomial, UpdateStats, VirtualSineArray,
                    absolute_term_sum, approx_query, brute_query, candidates,
                    compute_buffer, lagrange_table, ola_query, ola_update,
                    onestep, range_sum, scale_count)
from olabuf.ola import _candidate_windows

from conftest import assert_close, tol


def random_case(rng, orders=(2, 4, 8, 16), bins=(2, 4, 8, 16, 32), nmax=4096):
    order = int(rng.choice(orders))
    b = int(rng.choice(bins))
    n = int(rng.integers(order * b, max(order * b + 1, nmax + 1)))
    vals = rng.uniform(-1, 1, n)
    return order, b, n, vals


def random_poly(rng, n, order):
    p, q = sorted(int(x) for x in rng.integers(0, n, 2))
    deg = int(rng.integers(0, order))
    return RangePolynomial(p, q, tuple(rng.uniform(-1, 1, deg + 1)))


class TestOnestep:
    def test_ones_of_nine(self):
        t = lagrange_table(2, 1, 1)
        out = onestep(np.ones(9), 0, t)
        # definition check: B_k = sum_j c_j a_{2k+j} with zero padding
        want = [sum(t.coefficient(j) * (1.0 if 0 <= 2 * k + j < 9 else 0.0)
                    for j in range(-2, 2)) for k in range(5)]
        np.testing.assert_allclose(out, want, atol=1e-15)

    def test_length_contract(self):
        t = lagrange_table(2, 1, 1)
        for n in (4, 7, 9, 16, 33):
            for s in (0, 1):
                src = np.ones(n)
                assert onestep(src, s, t).shape[0] == n // 2 ** (s + 1) + 1

    def test_zeros(self):
        t = lagrange_table(4, 2, 2)
        assert not onestep(np.zeros(64), 0, t).any()

    def test_impulse_at_node(self):
        t = lagrange_table(4, 2, 2)
        src = np.zeros(64)
        src[12] = 3.0  # multiple of b: contributes to component 3 only
        out = onestep(src, 0, t)
        want = np.zeros(17)
        want[3] = 3.0
        np.testing.assert_array_equal(out, want)


class TestComputeBuffer:
    def test_ones_of_eight(self):
        a = MemoryArray(np.ones(8))
        t = lagrange_table(2, 1, 1)
        scale1 = onestep(a.read_block(0, 8), 0, t)
        np.testing.assert_allclose(scale1, [1.5, 2.0, 2.0, 2.0, 0.5], atol=1e-15)
        assert scale1.sum() == 8.0  # constant weight at the nodes recovers the total

    def test_zero_array(self):
        buf = compute_buffer(MemoryArray(np.zeros(64)), 2, 2)
        assert not buf.components.any()

    def test_buffer_size(self):
        for n, b in [(64, 2), (100, 4), (4097, 16)]:
            buf = compute_buffer(MemoryArray(np.zeros(n)), b, 2)
            assert buf.components.shape[0] == n // b + 1

    def test_beta_definition(self):
        assert scale_count(8, 2, 2) == 2
        assert scale_count(4096, 4, 4) == 5
        assert scale_count(2 ** 22, 128, 4) == 2
        buf = compute_buffer(MemoryArray(np.zeros(4096)), 4, 4)
        assert buf.beta == 5

    def test_parameter_errors(self):
        a = MemoryArray(np.zeros(64))
        with pytest.raises(ParameterError):
            compute_buffer(a, 2, 3)  # odd
        with pytest.raises(ParameterError):
            compute_buffer(a, 2, 0)
        with pytest.raises(ParameterError):
            compute_buffer(MemoryArray(np.zeros(7)), 2, 4)  # too small
        with pytest.raises(ParameterError):
            compute_buffer(a, 1, 2)

    def test_sparse_equals_update_driven(self):
        rng = np.random.default_rng(20)
        n, b, order = 512, 4, 4
        vals = np.zeros(n)
        nz = rng.choice(n, size=9, replace=False)
        vals[nz] = rng.uniform(-1, 1, 9)
        direct = compute_buffer(MemoryArray(vals), b, order)
        incremental = compute_buffer(MemoryArray(np.zeros(n)), b, order)
        for j in nz:
            ola_update(incremental, int(j), float(vals[j]))
        np.testing.assert_allclose(incremental.components, direct.components,
                                   rtol=0, atol=1e-12)

    def test_single_pass_reads(self):
        c = CountingArray(MemoryArray(np.ones(1024)), track_indices=True)
        compute_buffer(c, 4, 4)
        np.testing.assert_array_equal(c.index_reads, np.ones(1024, dtype=np.int64))

    def test_inplace_layout_keeps_base_scale(self):
        # components not overwritten by higher scales still hold the
        # plain first-pass values
        rng = np.random.default_rng(19)
        vals = rng.uniform(-1, 1, 777)
        buf = compute_buffer(MemoryArray(vals), 4, 4)
        first = onestep(vals, 0, buf.table)
        keep = np.arange(first.shape[0]) % 4 != 0
        np.testing.assert_array_equal(buf.components[keep], first[keep])


class TestCandidates:
    def test_left_clamp(self):
        idx = candidates(1000, 0, 1, 500, 8, 4)
        assert idx.min() == 0

    def test_right_clamp(self):
        idx = candidates(1000, 0, 500, 998, 8, 4)
        assert idx.max() == 999

    def test_same_bin_merges(self):
        b, order = 8, 4
        wins = _candidate_windows(10_000, 0, 523, 525, b, order)
        assert len(wins) == 1
        lo, hi = wins[0]
        assert hi - lo <= order * b

    def test_window_contents(self):
        size, s, p, q, b, order = 100_000, 1, 40_000, 90_000, 4, 4
        idx = set(candidates(size, s, p, q, b, order).tolist())
        half, bs1 = order // 2, b ** (s + 1)
        want = set()
        for e in (p, q):
            base = e // bs1
            want |= set(range(max((base - half) * b, 0),
                              min((base + half) * b, size)))
        assert idx == want


class TestQuery:
    def test_small_sum(self):
        a = MemoryArray(np.arange(1.0, 9.0))
        buf = compute_buffer(a, 2, 2)
        assert_close(ola_query(a, buf, range_sum(0, 7)), 36.0, scale=36.0)

    def test_zero_weight(self):
        a = MemoryArray(np.arange(1.0, 9.0))
        buf = compute_buffer(a, 2, 2)
        assert ola_query(a, buf, RangePolynomial(0, 7, ())) == 0.0

    def test_sine_first_moments(self):
        rng = np.random.default_rng(21)
        a = VirtualSineArray(2 ** 16)
        buf = compute_buffer(a, 16, 4)
        for _ in range(25):
            p, q = sorted(int(x) for x in rng.integers(0, 2 ** 16, 2))
            f = RangePolynomial(p, q, (0.0, 1.0))
            got = ola_query(a, buf, f)
            want = brute_query(a, f)
            assert_close(got, want, scale=absolute_term_sum(a, f))

    def test_degree_too_high(self):
        a = MemoryArray(np.zeros(64))
        buf = compute_buffer(a, 2, 2)
        with pytest.raises(ParameterError):
            ola_query(a, buf, RangePolynomial(0, 9, (1.0, 1.0, 1.0)))

    def test_bounds(self):
        a = MemoryArray(np.zeros(64))
        buf = compute_buffer(a, 2, 2)
        with pytest.raises(BoundsError):
            ola_query(a, buf, range_sum(60, 64))

    def test_read_confinement(self):
        rng = np.random.default_rng(22)
        n, b, order = 2 ** 14, 32, 4
        a = CountingArray(VirtualSineArray(n), track_indices=True)
        buf = compute_buffer(a, b, order)
        for _ in range(20):
            p, q = sorted(int(x) for x in rng.integers(0, n, 2))
            a.reset()
            ola_query(a, buf, range_sum(p, q))
            assert a.reads <= 2 * order * b
            touched = np.nonzero(a.index_reads)[0]
            wins = _candidate_windows(n, 0, p, q, b, order)
            for i in touched:
                assert any(lo <= i < hi for lo, hi in wins)

    def test_exactness_sweep(self):
        rng = np.random.default_rng(23)
        for _ in range(150):
            order, b, n, vals = random_case(rng)
            a = MemoryArray(vals)
            buf = compute_buffer(a, b, order)
            for _ in range(3):
                f = random_poly(rng, n, order)
                got = ola_query(a, buf, f)
                want = brute_query(a, f)
                assert_close(got, want, scale=absolute_term_sum(a, f))


class TestDeltaProperties:
    def delta0(self, buf, f, i):
        t = buf.table
        base = i // buf.b
        return f(i) - sum(
            f((base + k) * buf.b) * t.coefficient(i - (base + k) * buf.b)
            for k in t.node_range
        )

    def test_vanishes_for_global_polynomials(self):
        n, b, order = 256, 4, 4
        buf = compute_buffer(MemoryArray(np.zeros(n)), b, order)
        f = RangePolynomial(-10 * n, 10 * n, (1.0, -2.0, 0.5, 0.25))
        for i in range(0, n):
            assert abs(self.delta0(buf, f, i)) <= tol(n ** 3)

    def test_vanishes_at_node_positions(self):
        n, b, order = 512, 8, 4
        buf = compute_buffer(MemoryArray(np.zeros(n)), b, order)
        rng = np.random.default_rng(24)
        for _ in range(10):
            f = random_poly(rng, n, order)
            for k in range(0, n // b):
                assert abs(self.delta0(buf, f, k * b)) <= tol((n * 1.0) ** 3)

    def test_endpoint_locality(self):
        n, b, order = 2048, 8, 4
        buf = compute_buffer(MemoryArray(np.zeros(n)), b, order)
        f = range_sum(700, 1500)
        width = order * b
        for i in range(n):
            d = self.delta0(buf, f, i)
            near_lo = abs(i - 700) <= width
            near_hi = abs(i - 1500) <= width
            if not (near_lo or near_hi):
                assert abs(d) <= 1e-12


class TestUpdate:
    def test_zero_delta(self):
        buf = compute_buffer(MemoryArray(np.ones(64)), 2, 2)
        before = buf.components.copy()
        ola_update(buf, 13, 0.0)
        np.testing.assert_array_equal(buf.components, before)

    def test_bounds(self):
        buf = compute_buffer(MemoryArray(np.ones(64)), 2, 2)
        with pytest.raises(BoundsError):
            ola_update(buf, 64, 1.0)

    @pytest.mark.parametrize("order,b", [(2, 2), (4, 4), (4, 32), (8, 2), (16, 2)])
    def test_rebuild_equivalence_and_frontier(self, order, b):
        rng = np.random.default_rng(order * 100 + b)
        n = max(order * b * 4, 1024)
        vals = rng.uniform(-1, 1, n)
        a = MemoryArray(vals.copy())
        buf = compute_buffer(a, b, order)
        worst = 0
        for _ in range(200):
            j = int(rng.integers(0, n))
            d = float(rng.uniform(-1, 1))
            stats = UpdateStats()
            ola_update(buf, j, d, stats)
            a.set(j, a.get(j) + d)
            worst = max(worst, stats.max_live_keys)
        assert worst <= 2 * order
        fresh = compute_buffer(a, b, order)
        scale = np.abs(fresh.components).max() + 1.0
        np.testing.assert_allclose(buf.components, fresh.components,
                                   rtol=0, atol=tol(scale))
        f = random_poly(rng, n, order)
        assert_close(ola_query(a, buf, f), ola_query(a, fresh, f),
                     scale=absolute_term_sum(a, f))


class TestApproxQuery:
    def test_max_bins_equals_exact(self):
        rng = np.random.default_rng(25)
        for _ in range(20):
            order, b, n, vals = random_case(rng, orders=(2, 4, 8), bins=(4, 8, 16))
            a = MemoryArray(vals)
            buf = compute_buffer(a, b, order)
            f = random_poly(rng, n, order)
            exact = ola_query(a, buf, f)
            got, reads = approx_query(a, buf, f, order - 1)
            assert got == exact  # identical code path, bit-identical
            assert reads <= 2 * order * b

    def test_zero_bins_reads_nothing(self):
        a = CountingArray(MemoryArray(np.random.default_rng(26).uniform(-1, 1, 512)))
        buf = compute_buffer(a, 8, 4)
        a.reset()
        _, reads = approx_query(a, buf, range_sum(100, 400), 0)
        assert reads == 0
        assert a.reads == 0

    def test_worst_case_bound_order_two(self):
        rng = np.random.default_rng(27)
        for _ in range(100):
            b = int(rng.choice([2, 4, 8, 16, 32]))
            n = int(rng.integers(2 * b, 2048))
            vals = rng.uniform(-1, 1, n)  # kappa = 1
            a = MemoryArray(vals)
            buf = compute_buffer(a, b, 2)
            p, q = sorted(int(x) for x in rng.integers(0, n, 2))
            est, reads = approx_query(a, buf, range_sum(p, q), 0)
            exact = brute_query(a, range_sum(p, q))
            assert reads == 0
            assert abs(est - exact) <= 2 * (b / 2) * 1.0 + tol(n)

    def test_monotone_refinement_on_step_family(self):
        # mid-bin endpoints; array chosen adversarially within |a| <= 1 so
        # the residual equals the uncovered correction mass
        b, order, n = 64, 8, 8192
        buf_src = VirtualSineArray(n)
        buf = compute_buffer(buf_src, b, order)
        p = 20 * b + b // 2
        q = 100 * b + b // 2
        f = range_sum(p, q)
        deltas = np.zeros(n)
        t = buf.table
        for i in range(n):
            base = i // b
            deltas[i] = f(i) - sum(
                f((base + k) * b) * t.coefficient(i - (base + k) * b)
                for k in t.node_range
            )
        a = MemoryArray(np.sign(deltas))
        buf = compute_buffer(a, b, order)
        exact = brute_query(a, f)
        residuals = []
        for bins in range(order):
            est, _ = approx_query(a, buf, f, bins)
            residuals.append(abs(est - exact))
        for r1, r2 in zip(residuals, residuals[1:]):
            assert r2 <= r1 + tol(n)
        assert residuals[-1] <= tol(n)

    def test_parameter_validation(self):
        buf = compute_buffer(MemoryArray(np.zeros(64)), 2, 2)
        with pytest.raises(ParameterError):
            approx_query(MemoryArray(np.zeros(64)), buf, range_sum(0, 63), 2)
        with pytest.raises(ParameterError):
            approx_query(MemoryArray(np.zeros(64)), buf, range_sum(0, 63), -1)


class TestStats:
    def test_query_stats_populated(self):
        a = CountingArray(VirtualSineArray(4096))
        buf = compute_buffer(a, 8, 4)
        a.reset()
        stats = QueryStats()
        ola_query(a, buf, range_sum(100, 4000), stats)
        assert stats.external_reads == a.reads > 0
        assert stats.buffer_reads > 0
