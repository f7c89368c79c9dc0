import numpy as np
import pytest

from ftnsim.waveform import FtnParams, make_isi_kernel


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def default_kernel():
    return make_isi_kernel(FtnParams(tau=0.8, beta=0.5, nu=10, N=128))


@pytest.fixture(scope="session")
def small_kernel():
    return make_isi_kernel(FtnParams(tau=0.8, beta=0.5, nu=4, N=32))
