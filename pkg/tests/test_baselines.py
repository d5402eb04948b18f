import numpy as np
import pytest

from olabuf import (BoundsError, MemoryArray, PrefixSumBuffer,
                    RelativePrefixSumBuffer, brute_query, ps_build, ps_query,
                    ps_update, range_sum, rps_build, rps_query, rps_update)

from conftest import assert_close


def test_ps_example():
    buf = ps_build(MemoryArray([1.0, 2.0, 3.0]))
    np.testing.assert_array_equal(buf.sums, [1.0, 3.0, 6.0])
    assert ps_query(buf, 1, 2) == 5.0
    assert ps_query(buf, 0, 0) == 1.0


def test_ps_update_shifts_suffix():
    buf = ps_build(MemoryArray([1.0, 2.0, 3.0]))
    touched = ps_update(buf, 0, 2.0)
    assert touched == 3
    np.testing.assert_array_equal(buf.sums, [3.0, 5.0, 8.0])


def test_rps_layout_example():
    a = MemoryArray(np.arange(1.0, 7.0))
    buf = rps_build(a, 3)
    np.testing.assert_array_equal(buf.local, [1, 3, 6, 4, 9, 15])
    np.testing.assert_array_equal(buf.overlay, [6, 21])


def test_rps_overlay_invariant():
    rng = np.random.default_rng(30)
    vals = rng.uniform(-1, 1, 97)
    ps = ps_build(MemoryArray(vals))
    rps = rps_build(MemoryArray(vals), 7)
    for i in range(97):
        g = i // 7
        head = rps.overlay[g - 1] if g > 0 else 0.0
        assert_close(rps.local[i] + head, ps.sums[i], scale=float(np.abs(vals).sum()))


def test_rps_matches_ps_randomized():
    rng = np.random.default_rng(31)
    vals = rng.uniform(-1, 1, 500)
    ps = ps_build(MemoryArray(vals))
    rps = rps_build(MemoryArray(vals))
    for _ in range(200):
        k, l = sorted(int(x) for x in rng.integers(0, 500, 2))
        assert_close(rps_query(rps, k, l), ps_query(ps, k, l),
                     scale=float(np.abs(vals[k:l + 1]).sum()))


def test_rps_update_touch_budget():
    rng = np.random.default_rng(32)
    n = 700
    vals = rng.uniform(-1, 1, n)
    rps = rps_build(MemoryArray(vals))
    ps = ps_build(MemoryArray(vals))
    b = rps.block
    for _ in range(50):
        j = int(rng.integers(0, n))
        d = float(rng.uniform(-1, 1))
        touched = rps_update(rps, j, d)
        ps_update(ps, j, d)
        assert touched <= b + n / b + 1
    for _ in range(50):
        k, l = sorted(int(x) for x in rng.integers(0, n, 2))
        assert_close(rps_query(rps, k, l), ps_query(ps, k, l), scale=float(n))


def test_zero_delta_update():
    rps = rps_build(MemoryArray(np.arange(9.0)), 3)
    local, overlay = rps.local.copy(), rps.overlay.copy()
    rps_update(rps, 4, 0.0)
    np.testing.assert_array_equal(rps.local, local)
    np.testing.assert_array_equal(rps.overlay, overlay)


def test_default_block_is_sqrt():
    assert rps_build(MemoryArray(np.zeros(100))).block == 10
    assert rps_build(MemoryArray(np.zeros(101))).block == 11


def test_bounds():
    buf = rps_build(MemoryArray(np.zeros(10)), 3)
    with pytest.raises(BoundsError):
        rps_query(buf, 0, 10)
    with pytest.raises(BoundsError):
        rps_update(buf, 10, 1.0)
    ps = ps_build(MemoryArray(np.zeros(10)))
    with pytest.raises(BoundsError):
        ps_query(ps, -1, 3)


def test_agree_with_brute_force():
    rng = np.random.default_rng(33)
    vals = rng.uniform(-1, 1, 333)
    a = MemoryArray(vals)
    ps = ps_build(a)
    rps = rps_build(a)
    for _ in range(50):
        k, l = sorted(int(x) for x in rng.integers(0, 333, 2))
        want = brute_query(a, range_sum(k, l))
        scale = float(np.abs(vals[k:l + 1]).sum())
        assert_close(ps_query(ps, k, l), want, scale=scale)
        assert_close(rps_query(rps, k, l), want, scale=scale)
