"""Buffered range sums and local moments over large external arrays.

Three related structures:

* ``binbuf``: one aggregate per bin (SUM, MAX or moment tuples), with an
  in-place hierarchical variant for invertible aggregates.
* ``ola``: a single real-valued overlapped buffer whose interpolation
  weights make it answer *every* polynomial range query of degree < N,
  with lazy endpoint corrections, O(N^2 log n) updates and progressive
  approximate answers.
* ``baselines``: prefix-sum and relative-prefix-sum cross-checks.

Hot loops run through numba-compiled kernels by default; set
``OLABUF_BACKEND=numpy`` before import to use the pure-numpy fallback.
"""

from ._kernels import BACKEND
from .core import (MAX, SUM, MomentTuple, QueryKind, RangePolynomial,
                   absolute_term_sum, brute_max, brute_moments, brute_query,
                   f_merge, g_singleton, moments, range_moment, range_sum,
                   recenter)
from .errors import BoundsError, ParameterError, ReadOnlyArrayError
from .binbuf import (BinBuffer, HierarchicalBinBuffer, QueryTrace, build,
                     build_hier, query, query_hier, update, update_hier)
from .lagrange import (LagrangeTable, error_mass_profile, interpolant_h,
                       interpolant_h_many, lagrange_table)
from .ola import (OlaBuffer, QueryStats, UpdateStats, approx_query,
                  candidates, compute_buffer, ola_query, ola_update, onestep,
                  scale_count)
from .baselines import (PrefixSumBuffer, RelativePrefixSumBuffer, ps_build,
                        ps_query, ps_update, rps_build, rps_query, rps_update)
from .storage import (CountingArray, ExternalArray, FileArray, MemoryArray,
                      VirtualSineArray)
from .cli import read_buffer_file, write_buffer_file

__all__ = [
    "BACKEND",
    "MomentTuple", "RangePolynomial", "QueryKind", "SUM", "MAX", "moments",
    "g_singleton", "f_merge", "recenter", "brute_query", "brute_max",
    "brute_moments", "absolute_term_sum", "range_sum", "range_moment",
    "ParameterError", "BoundsError", "ReadOnlyArrayError",
    "BinBuffer", "HierarchicalBinBuffer", "QueryTrace",
    "build", "query", "update", "build_hier", "query_hier", "update_hier",
    "LagrangeTable", "lagrange_table", "interpolant_h", "interpolant_h_many",
    "error_mass_profile",
    "OlaBuffer", "QueryStats", "UpdateStats", "compute_buffer", "onestep",
    "candidates", "ola_query", "ola_update", "approx_query", "scale_count",
    "PrefixSumBuffer", "RelativePrefixSumBuffer",
    "ps_build", "ps_query", "ps_update", "rps_build", "rps_query", "rps_update",
    "ExternalArray", "MemoryArray", "VirtualSineArray", "FileArray",
    "CountingArray",
    "read_buffer_file", "write_buffer_file",
]
