"""Backend dispatch for the hot numeric loops.

The default backend is numba (JIT-compiled); set ``OLABUF_BACKEND=numpy``
to force the pure-numpy fallback, or ``OLABUF_BACKEND=numba`` to fail
loudly if numba is unavailable. ``benchmarks/backend_compare.py`` times
the two side by side.
"""

import os

_REQUESTED = os.environ.get("OLABUF_BACKEND", "").strip().lower()

if _REQUESTED not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"OLABUF_BACKEND={_REQUESTED!r} not understood (use 'numba' or 'numpy')"
    )


def get_backend(name: str):
    """Import and return a kernel module by name."""
    if name == "numpy":
        from . import numpy_impl
        return numpy_impl
    if name == "numba":
        from . import numba_impl
        return numba_impl
    raise ValueError(f"unknown backend {name!r}")


if _REQUESTED == "numpy":
    _impl = get_backend("numpy")
    BACKEND = "numpy"
elif _REQUESTED == "numba":
    _impl = get_backend("numba")
    BACKEND = "numba"
else:
    try:
        _impl = get_backend("numba")
        BACKEND = "numba"
    except ImportError:
        _impl = get_backend("numpy")
        BACKEND = "numpy"

onestep = _impl.onestep
delta_window_sum = _impl.delta_window_sum
coarse_sweep = _impl.coarse_sweep
warmup = _impl.warmup
