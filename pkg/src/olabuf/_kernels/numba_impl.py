"""JIT-compiled inner loops. Signatures mirror numpy_impl exactly.

All kernels take the flat coefficient array ``c`` (support
``[-half*b, half*b)``) together with its zero offset ``coff = half*b``.
``fastmath`` stays off so both backends agree to within summation order.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def poly_eval(x, flo, fhi, fcoef):
    if x < flo or x > fhi:
        return 0.0
    t = float(x - flo)
    acc = 0.0
    for i in range(fcoef.shape[0] - 1, -1, -1):
        acc = acc * t + fcoef[i]
    return acc


@njit(cache=True)
def onestep(src, b, half, c, coff, out_len):
    """One buffering pass: out[k] = sum_j c_j * src[k*b + j].

    Indices at multiples of b contribute to exactly one component with
    weight 1; the rest spread over the overlap window.
    """
    out = np.zeros(out_len, dtype=np.float64)
    n = src.shape[0]
    for i in range(n):
        v = src[i]
        base = i // b
        r = i - base * b
        if r == 0:
            if base < out_len:
                out[base] += v
        else:
            for m in range(-half + 1, half + 1):
                k = base + m
                if 0 <= k < out_len:
                    out[k] += c[coff + r - m * b] * v
    return out


@njit(cache=True)
def delta_window_sum(vals, base, lo, hi, b, half, c, coff,
                     pos_scale, node_scale, flo, fhi, fcoef):
    """Correction sweep over one candidate window ``[lo, hi)``.

    Accumulates ``delta(i) * vals[i - base]`` where
    ``delta(i) = f(i * pos_scale) - sum_m f((i//b + m) * node_scale) * c[r - m*b]``.
    Indices at multiples of b are skipped: their correction is exactly zero.
    """
    total = 0.0
    for i in range(lo, hi):
        base_bin = i // b
        r = i - base_bin * b
        if r == 0:
            continue
        d = poly_eval(i * pos_scale, flo, fhi, fcoef)
        for m in range(-half + 1, half + 1):
            d -= poly_eval((base_bin + m) * node_scale, flo, fhi, fcoef) * c[coff + r - m * b]
        total += d * vals[i - base]
    return total


@njit(cache=True)
def coarse_sweep(vals, node_scale, flo, fhi, fcoef):
    """Top-scale sweep: sum_k f(k * node_scale) * vals[k]."""
    total = 0.0
    for k in range(vals.shape[0]):
        total += poly_eval(k * node_scale, flo, fhi, fcoef) * vals[k]
    return total


def warmup():
    """Force compilation of every kernel once (tiny inputs)."""
    c = np.array([0.0, 0.5, 1.0, 0.5], dtype=np.float64)
    src = np.ones(5, dtype=np.float64)
    fcoef = np.array([1.0], dtype=np.float64)
    onestep(src, 2, 1, c, 2, 3)
    delta_window_sum(src, 0, 0, 5, 2, 1, c, 2, 1, 2, 0, 4, fcoef)
    coarse_sweep(src, 2, 0, 8, fcoef)
