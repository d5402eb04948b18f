"""External-array backings: in-memory, synthetic, and file-backed, plus a
counting decorator used by the access-count benchmarks.

The contract is indexed access to float64 values. ``read_block`` is the
bulk form the query and construction passes use; a block read of width w
counts as w element reads on an instrumented array.

Counters are plain ints: the harness is single-threaded, and concurrent
gets on the raw backings need no coordination anyway.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod

import numpy as np

from .errors import BoundsError, ReadOnlyArrayError


class ExternalArray(ABC):
    """Indexed source of float64 values, possibly too large to hold in RAM."""

    @abstractmethod
    def __len__(self) -> int: ...

    @abstractmethod
    def read_block(self, lo: int, hi: int) -> np.ndarray:
        """Values at indices ``[lo, hi)`` as a float64 array."""

    def get(self, i: int) -> float:
        self._check_index(i)
        return float(self.read_block(i, i + 1)[0])

    def set(self, i: int, value: float) -> None:
        raise ReadOnlyArrayError(f"{type(self).__name__} is read-only")

    def _check_index(self, i: int) -> None:
        if not 0 <= i < len(self):
            raise BoundsError(f"index {i} outside array of length {len(self)}")

    def _check_range(self, lo: int, hi: int) -> None:
        if not (0 <= lo <= hi <= len(self)):
            raise BoundsError(f"block [{lo}, {hi}) outside array of length {len(self)}")


class MemoryArray(ExternalArray):
    """Mutable in-memory backing over a float64 numpy array."""

    def __init__(self, values) -> None:
        self.data = np.ascontiguousarray(values, dtype=np.float64)
        if self.data.ndim != 1:
            raise ValueError("MemoryArray expects a one-dimensional array")

    def __len__(self) -> int:
        return self.data.shape[0]

    def read_block(self, lo: int, hi: int) -> np.ndarray:
        self._check_range(lo, hi)
        return self.data[lo:hi]

    def get(self, i: int) -> float:
        self._check_index(i)
        return float(self.data[i])

    def set(self, i: int, value: float) -> None:
        self._check_index(i)
        self.data[i] = value


class VirtualSineArray(ExternalArray):
    """Synthetic read-only array with ``a_i = sin(i)``, i in radians.

    Element access is a computation rather than a memory or disk access,
    which makes read counts the meaningful cost measure.
    """

    def __init__(self, n: int) -> None:
        if n < 0:
            raise ValueError("length must be non-negative")
        self._n = n

    def __len__(self) -> int:
        return self._n

    def get(self, i: int) -> float:
        self._check_index(i)
        return math.sin(i)

    def read_block(self, lo: int, hi: int) -> np.ndarray:
        self._check_range(lo, hi)
        return np.sin(np.arange(lo, hi, dtype=np.float64))


class FileArray(ExternalArray):
    """Array stored as packed little-endian IEEE-754 doubles, no header.

    A 32-bit mode (``dtype="<f4"``) is available for storage-size parity
    experiments; values still surface as float64.
    """

    def __init__(self, path, writable: bool = False, dtype: str = "<f8") -> None:
        if dtype not in ("<f8", "<f4"):
            raise ValueError("dtype must be '<f8' or '<f4'")
        self.path = path
        self._dtype = np.dtype(dtype)
        self._map = np.memmap(path, dtype=self._dtype, mode="r+" if writable else "r")
        self._writable = writable

    @staticmethod
    def create(path, values, dtype: str = "<f8") -> "FileArray":
        arr = np.ascontiguousarray(values, dtype=np.dtype(dtype))
        with open(path, "wb") as fh:
            fh.write(arr.tobytes())
        return FileArray(path, writable=True, dtype=dtype)

    def __len__(self) -> int:
        return self._map.shape[0]

    def read_block(self, lo: int, hi: int) -> np.ndarray:
        self._check_range(lo, hi)
        return np.asarray(self._map[lo:hi], dtype=np.float64)

    def get(self, i: int) -> float:
        self._check_index(i)
        return float(self._map[i])

    def set(self, i: int, value: float) -> None:
        if not self._writable:
            raise ReadOnlyArrayError("FileArray opened read-only")
        self._check_index(i)
        self._map[i] = value

    def flush(self) -> None:
        self._map.flush()


class CountingArray(ExternalArray):
    """Transparent decorator counting element reads and writes.

    With ``track_indices=True`` a per-index read histogram is kept, which
    the construction-pass tests use to assert single-pass behaviour.
    """

    def __init__(self, inner: ExternalArray, track_indices: bool = False) -> None:
        self.inner = inner
        self.reads = 0
        self.writes = 0
        self.index_reads = np.zeros(len(inner), dtype=np.int64) if track_indices else None

    def __len__(self) -> int:
        return len(self.inner)

    def read_block(self, lo: int, hi: int) -> np.ndarray:
        self.reads += hi - lo
        if self.index_reads is not None:
            self.index_reads[lo:hi] += 1
        return self.inner.read_block(lo, hi)

    def get(self, i: int) -> float:
        self.reads += 1
        if self.index_reads is not None:
            self.index_reads[i] += 1
        return self.inner.get(i)

    def set(self, i: int, value: float) -> None:
        self.writes += 1
        self.inner.set(i, value)

    def reset(self) -> None:
        self.reads = 0
        self.writes = 0
        if self.index_reads is not None:
            self.index_reads[:] = 0
