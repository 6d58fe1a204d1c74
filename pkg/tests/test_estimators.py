import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hankeldoa.array_model import SourceScene, synthesize_snapshot
from hankeldoa.estimators import HankelCompleter, LeverageSampler, SpectralDoaEstimator
from hankeldoa.exceptions import DimensionError

SCENE = SourceScene((-0.3, 0.2), (1, 1 - 1j))


@pytest.fixture
def full():
    return synthesize_snapshot(SCENE, 51).values


def test_get_params_roundtrip():
    for est in (LeverageSampler(m=12, mode="probabilistic"), HankelCompleter(factor_rank=3),
                SpectralDoaEstimator(n_sources=2, method="prony")):
        params = est.get_params()
        twin = clone(est)
        assert twin.get_params() == params
        twin.set_params(**params)


def test_sampler_then_completer_then_doa(full):
    rng = np.random.default_rng(5)
    first = full.copy()
    first[rng.choice(51, 31, replace=False)] = np.nan
    sampler = LeverageSampler(m=20).fit(first)
    assert sampler.get_support().sum() == 20
    assert {1, 51} <= set(sampler.get_support(indices=True))
    assert sampler.scores_.shape == (51,) and sampler.rank_ == 2

    second = sampler.transform(full)
    assert np.isnan(second).sum() == 31
    filled = HankelCompleter().fit_transform(second)
    assert not np.isnan(filled).any()
    np.testing.assert_allclose(filled[0], full, atol=1e-5)

    doa = SpectralDoaEstimator().fit(filled)
    np.testing.assert_allclose(doa.taus_, [-0.3, 0.2], atol=1e-6)
    np.testing.assert_allclose(doa.predict([52, 53]), synthesize_snapshot(SCENE, 53).values[51:],
                               atol=1e-4)
    assert doa.score(full[None]) > -1e-5


def test_completer_many_rows(full):
    X = np.vstack([full, 2 * full])
    X[:, [3, 10, 20, 30, 40]] = np.nan
    out = HankelCompleter(factor_rank=2).fit(X).transform(X)
    np.testing.assert_allclose(out, np.vstack([full, 2 * full]), atol=1e-5)
    assert len(HankelCompleter().fit(X).transform(X)) == 2


def test_validation(full):
    with pytest.raises(NotFittedError):
        LeverageSampler().transform(full)
    with pytest.raises(NotFittedError):
        SpectralDoaEstimator().predict([1])
    with pytest.raises(DimensionError):
        HankelCompleter().fit(full).transform(full[:10])
    with pytest.raises(DimensionError):
        SpectralDoaEstimator().fit(np.where(np.arange(51) == 3, np.nan, full))
    with pytest.raises(DimensionError):
        HankelCompleter().fit(np.full(5, np.nan))
    with pytest.raises(DimensionError):
        HankelCompleter().fit(np.ones((2, 2, 2)))
    with pytest.raises(ValueError):
        LeverageSampler(m=5).fit(np.vstack([full, full]))
