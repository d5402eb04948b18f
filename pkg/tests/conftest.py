import pytest

from olabuf import _kernels

# Relative tolerance convention: 1e-9 scaled by the sum of absolute
# terms entering the computation, with an absolute floor of 1e-12.
REL = 1e-9
ABS_FLOOR = 1e-12


def tol(scale: float) -> float:
    return max(ABS_FLOOR, REL * abs(scale))


def assert_close(got: float, want: float, scale: float | None = None) -> None:
    if scale is None:
        scale = abs(want)
    assert abs(got - want) <= tol(scale), f"{got} != {want} (scale {scale})"


def assert_tuples_close(got, want, scale: float = 1.0) -> None:
    assert got.m == want.m
    for g, w in zip(got.values, want.values):
        assert_close(g, w, scale=max(scale, abs(w)))


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # pay any JIT compilation cost once, outside timed tests
    _kernels.warmup()
