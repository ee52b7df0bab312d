import numpy as np
import pytest

from ampcs.model import SystemParams, snr_to_sigma_v
from ampcs.quantizer import DesignInputs


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def reference_inputs():
    """The homogeneous setup used throughout the numerical experiments:
    N=1000, K=10, M=100, sigma_s=1, SNR=10 dB (linear 10), pe=0.05."""
    base = SystemParams(1000, 10, 100, 1.0, 0.0)
    sigma_v = snr_to_sigma_v(10.0, base)
    return DesignInputs(sigma2=base.sigma2, sigma_v=sigma_v, pe=np.full(100, 0.05))
