import numpy as np
import pytest

from qhyp.qcore import QContext


@pytest.fixture
def ctx():
    return QContext(0.45)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def rand_complex(rng, lo=0.4, hi=1.6, phase=0.85):
    return rng.uniform(lo, hi) * np.exp(1j * rng.uniform(-phase * np.pi, phase * np.pi))
