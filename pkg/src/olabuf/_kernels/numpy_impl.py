"""Vectorized fallback for the hot loops; no compilation required.

Results match numba_impl to within floating-point summation order.
"""

import numpy as np


def _poly_many(xs, flo, fhi, fcoef):
    t = (xs - flo).astype(np.float64)
    acc = np.zeros_like(t)
    for c in fcoef[::-1]:
        acc = acc * t + c
    return np.where((xs >= flo) & (xs <= fhi), acc, 0.0)


def onestep(src, b, half, c, coff, out_len):
    """out[k] = sum_j c_j * src[k*b + j], one slice-add per offset j."""
    src = np.asarray(src, dtype=np.float64)
    out = np.zeros(out_len, dtype=np.float64)
    n = src.shape[0]
    for j in range(-half * b, half * b):
        cj = c[coff + j]
        if cj == 0.0:
            continue
        # source positions k*b + j must land in [0, n)
        k_lo = max(0, (-j + b - 1) // b)
        k_hi = min(out_len - 1, (n - 1 - j) // b)
        if k_lo > k_hi:
            continue
        out[k_lo:k_hi + 1] += cj * src[k_lo * b + j:k_hi * b + j + 1:b]
    return out


def delta_window_sum(vals, base, lo, hi, b, half, c, coff,
                     pos_scale, node_scale, flo, fhi, fcoef):
    if lo >= hi:
        return 0.0
    idx = np.arange(lo, hi, dtype=np.int64)
    idx = idx[idx % b != 0]
    if idx.size == 0:
        return 0.0
    fbin = idx // b
    r = idx - fbin * b
    d = _poly_many(idx * pos_scale, flo, fhi, fcoef)
    for m in range(-half + 1, half + 1):
        d -= _poly_many((fbin + m) * node_scale, flo, fhi, fcoef) * c[coff + r - m * b]
    sel = np.asarray(vals)[idx - base]
    return float(d @ sel)


def coarse_sweep(vals, node_scale, flo, fhi, fcoef):
    vals = np.asarray(vals, dtype=np.float64)
    pos = np.arange(vals.shape[0], dtype=np.int64) * node_scale
    return float(_poly_many(pos, flo, fhi, fcoef) @ vals)


def warmup():
    """Nothing to compile."""
