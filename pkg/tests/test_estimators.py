import math

import numpy as np
import pytest
from sklearn.base import clone

from quenchgap.errors import InvalidParamsError, NoPeakFoundError
from quenchgap.estimators import CriticalExponentEstimator, PowerLawScaling, SpectralGapEstimator
from quenchgap.response import mx_response_sudden, time_grid
from quenchgap.tfim import TfimParams, tfim_gap


def test_spectral_estimator_rows():
    t = time_grid(500.0, 1000)
    X = np.stack([np.cos(0.4 * t), np.cos(0.8 * t) + np.cos(1.5 * t), np.zeros_like(t)])
    est = SpectralGapEstimator(dt=0.5).fit(X)
    out = est.transform(X)
    assert out.shape == (3, 1)
    assert out[0, 0] == pytest.approx(0.4, abs=math.pi / 500)
    assert out[1, 0] == pytest.approx(0.8, abs=math.pi / 500)
    assert np.isnan(out[2, 0])
    with pytest.raises(NoPeakFoundError):
        SpectralGapEstimator(dt=0.5, strict=True).fit(X).transform(X)


def test_spectral_estimator_validates():
    with pytest.raises(InvalidParamsError):
        SpectralGapEstimator(dt=-1.0).fit(np.zeros((1, 100)))
    with pytest.raises(InvalidParamsError):
        SpectralGapEstimator(window="flat").fit(np.zeros((1, 100)))
    est = SpectralGapEstimator().fit(np.zeros((1, 100)))
    with pytest.raises(InvalidParamsError):
        est.transform(np.zeros((1, 99)))


def test_spectral_estimator_on_response():
    t = time_grid(500.0, 1000)
    rows = [mx_response_sudden(TfimParams(g=1.0, N=n), 0.01, t).values for n in (8, 16, 32)]
    gaps = SpectralGapEstimator(dt=0.5).fit_transform(np.stack(rows))[:, 0]
    for n, w in zip((8, 16, 32), gaps):
        assert abs(w - tfim_gap(TfimParams(g=1.0, N=n))) <= 2 * math.pi / 500


def test_power_law_regressor():
    N = np.array([40, 8, 20, 12])
    reg = PowerLawScaling().fit(N, 5.0 / N**0.5)
    assert reg.z_ == pytest.approx(0.5, abs=1e-12)
    assert reg.prefactor_ == pytest.approx(5.0)
    np.testing.assert_allclose(reg.predict([100]), [0.5])
    assert reg.score(N, 5.0 / N**0.5) == pytest.approx(1.0)


def test_params_round_trip():
    est = CriticalExponentEstimator(model="lrk", tau=300.0)
    assert est.get_params()["tau"] == 300.0
    est.set_params(tau=200.0)
    assert clone(est).tau == 200.0
    assert PowerLawScaling(sigma=0.1).get_params() == {"sigma": 0.1}


def test_critical_exponent_estimator_tfim():
    est = CriticalExponentEstimator(model="tfim").fit([8, 12, 16, 20, 28, 40])
    assert 0.94 <= est.z_ <= 1.02
    assert list(est.sizes_) == [8, 12, 16, 20, 28, 40]
    assert est.failed_sizes_ == []


def test_critical_exponent_estimator_rejects_bad_config():
    with pytest.raises(InvalidParamsError):
        CriticalExponentEstimator(model="tfim").fit([7, 9, 11])
