"""scikit-learn style wrappers around the spectral, scaling and pipeline stages.

The physics itself stays in plain functions; these classes only give the
data-processing stages the familiar ``fit`` / ``transform`` / ``predict``
shape, with ``get_params`` / ``set_params`` and input validation.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import InvalidParamsError, NoPeakFoundError
from .pipeline import RunConfig, run_sizes
from .response import TimeSeries
from .scaling import fit_exponent
from .spectral import WINDOWS, compute_spectrum, lowest_peak


class SpectralGapEstimator(TransformerMixin, BaseEstimator):
    """Rows of evenly sampled traces -> lowest spectral peak ``omega_m``.

    Rows without a qualifying peak map to NaN unless ``strict`` is set, in
    which case ``NoPeakFoundError`` propagates.
    """

    def __init__(self, dt=1.0, window="none", noise_floor=0.05, min_amplitude=0.0, refine=True, strict=False):
        self.dt = dt
        self.window = window
        self.noise_floor = noise_floor
        self.min_amplitude = min_amplitude
        self.refine = refine
        self.strict = strict

    def _check_params(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise InvalidParamsError(f"dt must be positive, got {self.dt!r}")
        if self.window not in WINDOWS:
            raise InvalidParamsError(f"window must be one of {WINDOWS}, got {self.window!r}")
        if not (0 <= self.noise_floor < 1):
            raise InvalidParamsError(f"noise_floor must be in [0, 1), got {self.noise_floor!r}")

    def fit(self, X, y=None):
        self._check_params()
        X = check_array(X, dtype=float)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise InvalidParamsError(f"expected {self.n_features_in_} samples per row, got {X.shape[1]}")
        times = np.arange(X.shape[1]) * float(self.dt)
        out = np.empty((X.shape[0], 1))
        self.peaks_ = []
        for i, row in enumerate(X):
            spec = compute_spectrum(TimeSeries(times, row), window=self.window)
            try:
                peak = lowest_peak(spec, self.noise_floor, self.min_amplitude, self.refine)
            except NoPeakFoundError:
                if self.strict:
                    raise
                peak = None
            self.peaks_.append(peak)
            out[i, 0] = np.nan if peak is None else peak.omega_m
        return out


class PowerLawScaling(RegressorMixin, BaseEstimator):
    """``gap = prefactor * N**(-z)`` fitted in log-log space.

    ``sigma`` is the absolute uncertainty of every gap (scalar or per point);
    ``None`` fits unweighted.
    """

    def __init__(self, sigma=None):
        self.sigma = sigma

    def fit(self, X, y):
        X = check_array(X, dtype=float, ensure_2d=False).reshape(-1)
        y = check_array(y, dtype=float, ensure_2d=False).reshape(-1)
        if X.shape != y.shape:
            raise InvalidParamsError("X and y must have the same number of points")
        order = np.argsort(X)
        sigma = self.sigma
        if sigma is not None and np.ndim(sigma) > 0:
            sigma = np.asarray(sigma, float)[order]
        self.fit_ = fit_exponent(X[order], y[order], sigma=sigma)
        self.z_ = self.fit_.z
        self.z_err_ = self.fit_.z_err
        self.prefactor_ = self.fit_.prefactor
        self.residual_ = self.fit_.residual
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "z_")
        X = check_array(X, dtype=float, ensure_2d=False).reshape(-1)
        return self.prefactor_ * X ** (-self.z_)


class CriticalExponentEstimator(BaseEstimator):
    """Run the full respond -> spectrum -> scaling chain on a list of sizes.

    ``fit(sizes)`` stores the extracted gaps in ``gaps_`` and the exponent in
    ``z_``; sizes without a peak are dropped and listed in ``failed_sizes_``.
    """

    def __init__(
        self,
        model="tfim",
        params=None,
        kind="sudden",
        amplitude=None,
        drive_frequency=0.0,
        temperature=0.0,
        tau=500.0,
        n_tau=None,
        window="none",
        noise_floor=0.05,
        min_amplitude=0.0,
        refine=True,
        workers=1,
    ):
        self.model = model
        self.params = params
        self.kind = kind
        self.amplitude = amplitude
        self.drive_frequency = drive_frequency
        self.temperature = temperature
        self.tau = tau
        self.n_tau = n_tau
        self.window = window
        self.noise_floor = noise_floor
        self.min_amplitude = min_amplitude
        self.refine = refine
        self.workers = workers

    def _config(self, sizes) -> RunConfig:
        return RunConfig(
            model=self.model,
            params=dict(self.params or {}),
            sizes=tuple(int(n) for n in sizes),
            kind=self.kind,
            amplitude=self.amplitude,
            drive_frequency=self.drive_frequency,
            temperature=self.temperature,
            tau=self.tau,
            n_tau=self.n_tau,
            window=self.window,
            noise_floor=self.noise_floor,
            min_amplitude=self.min_amplitude,
            refine=self.refine,
            workers=self.workers,
        ).resolved()

    def fit(self, X, y=None):
        sizes = check_array(X, dtype=None, ensure_2d=False).reshape(-1)
        self.config_ = self._config(sizes)
        self.results_ = run_sizes(self.config_)
        good = [r for r in self.results_ if r.peak is not None]
        self.failed_sizes_ = [r.N for r in self.results_ if r.peak is None]
        self.sizes_ = np.array([r.N for r in good])
        self.gaps_ = np.array([r.peak.omega_m for r in good])
        order = np.argsort(self.sizes_)
        self.sizes_, self.gaps_ = self.sizes_[order], self.gaps_[order]
        self.scaling_ = PowerLawScaling(sigma=np.pi / self.config_.tau).fit(self.sizes_, self.gaps_)
        self.z_ = self.scaling_.z_
        self.z_err_ = self.scaling_.z_err_
        return self

    def predict(self, X):
        check_is_fitted(self, "z_")
        return self.scaling_.predict(X)
