import numpy as np
import pytest

from sqcomb import CombParams

# the three benchmark encodings used throughout: N = 8 with sub-percent
# initial error, plus the workhorse (8, 4, 0.4)
BENCH_SETS = [(4.0, 0.5), (5.0, 0.3), (7.0, -0.1)]


@pytest.fixture(scope="session")
def comb_844():
    return CombParams(8, 4.0, 0.4)


@pytest.fixture(scope="session")
def bench_params():
    return [CombParams(8, d, r) for d, r in BENCH_SETS]


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)
