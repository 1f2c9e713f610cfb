import numpy as np
import pytest

from nfloc import (
    ArrayConfig,
    LinkBudget,
    Region,
    make_ff_codebook,
    make_nf_codebook,
)


@pytest.fixture(scope="session")
def cfg():
    """Full-size default array (24x24, 12 subcarriers)."""
    return ArrayConfig()


@pytest.fixture(scope="session")
def small_cfg():
    """Cheap array for estimator and bound tests."""
    return ArrayConfig(n_x=8, n_z=8, n_subcarriers=4)


@pytest.fixture(scope="session")
def region():
    return Region()


@pytest.fixture(scope="session")
def budget():
    return LinkBudget()


@pytest.fixture(scope="session")
def books(cfg, region):
    return make_ff_codebook(cfg, region, 21), make_nf_codebook(cfg, region, 84)


@pytest.fixture(scope="session")
def small_books(small_cfg, region):
    return make_ff_codebook(small_cfg, region, 9), make_nf_codebook(small_cfg, region, 36)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260815)
