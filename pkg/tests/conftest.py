import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_scene_taus(rng, r, min_sep, low=-0.5, high=0.5):
    """Rejection-sample ``r`` frequencies with circular separation >= min_sep."""
    while True:
        taus = np.sort(rng.uniform(low, high, r))
        gaps = np.diff(np.concatenate([taus, [taus[0] + 1.0]]))
        if r == 1 or gaps.min() >= min_sep:
            return taus
