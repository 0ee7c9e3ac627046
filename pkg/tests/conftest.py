import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


from multipir.field import make_field  # noqa: E402


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # the first call into the compiled kernels pays the numba compile (or
    # cache-load) cost; keep that out of timed acceptance budgets
    import numpy as np

    from multipir import _kernels

    f = make_field(2, 2)
    M = np.array([[1, 2, 3], [3, 1, 0]], dtype=np.int64)
    _kernels.rref(M, f.exp_np, f.log_np, 3, 2)
    y = np.zeros((3, 1), dtype=np.int64)
    binom = np.ones((3, 1), dtype=np.int64)
    _kernels.bw_decode_core(
        y, np.arange(1, 4, dtype=np.int64), 1, 1, 1, binom, f.exp_np, f.log_np, 3, 2
    )


@pytest.fixture(scope="session")
def gf4():
    return make_field(2, 2)


@pytest.fixture(scope="session")
def gf5():
    return make_field(5, 1)


@pytest.fixture(scope="session")
def gf8():
    return make_field(2, 3)


@pytest.fixture(scope="session")
def gf16():
    return make_field(2, 4)


@pytest.fixture(scope="session")
def gf256():
    return make_field(2, 8)


@pytest.fixture
def rng():
    return random.Random(0xC0DE)
