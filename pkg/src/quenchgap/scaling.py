"""Finite-size scaling: gap exponent fits and pseudo-critical coupling drift."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .errors import InsufficientPointsError, InvalidParamsError, NoBracketError, NonPositiveGapError

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ScalingFit:
    """``gap = prefactor * N**(-z)``; ``residual`` is the RMS misfit of ``log gap``."""

    sizes: np.ndarray
    gaps: np.ndarray
    sigma: np.ndarray | None
    z: float
    z_err: float
    prefactor: float
    residual: float

    def predict(self, sizes) -> np.ndarray:
        return self.prefactor * np.asarray(sizes, float) ** (-self.z)

    def as_dict(self) -> dict:
        pts = []
        for i, (n, d) in enumerate(zip(self.sizes, self.gaps)):
            pt = {"N": int(n), "gap": float(d)}
            if self.sigma is not None:
                pt["sigma"] = float(self.sigma[i])
            pts.append(pt)
        return {
            "points": pts,
            "z": self.z,
            "z_err": self.z_err,
            "prefactor": self.prefactor,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class NuScan:
    sizes: np.ndarray
    g_star: np.ndarray
    g_c: float
    nu: float
    amplitude: float
    g_c_err: float = math.nan
    nu_err: float = math.nan
    bounds: tuple = field(default=(math.nan, math.nan))

    def as_dict(self) -> dict:
        return {
            "sizes": [int(n) for n in self.sizes],
            "g_star": [float(g) for g in self.g_star],
            "g_c": self.g_c,
            "g_c_err": self.g_c_err,
            "nu": self.nu,
            "nu_err": self.nu_err,
            "amplitude": self.amplitude,
        }


def _validate_points(sizes, gaps, sigma):
    sizes = np.asarray(sizes, float)
    gaps = np.asarray(gaps, float)
    if sizes.ndim != 1 or sizes.shape != gaps.shape:
        raise InvalidParamsError("sizes and gaps must be 1-D arrays of equal length")
    if len(sizes) < 3:
        raise InsufficientPointsError(f"a scaling fit needs at least 3 points, got {len(sizes)}")
    if np.any(~np.isfinite(gaps)) or np.any(gaps <= 0):
        raise NonPositiveGapError(f"all gaps must be positive and finite, got {gaps.tolist()}")
    if np.any(sizes <= 0) or np.any(np.diff(sizes) <= 0):
        raise InvalidParamsError("sizes must be positive and strictly increasing")
    if sigma is not None:
        sigma = np.broadcast_to(np.asarray(sigma, float), gaps.shape).copy()
        if np.any(~(sigma > 0)):
            raise InvalidParamsError("gap uncertainties must be positive")
    return sizes, gaps, sigma


def fit_exponent(sizes, gaps, sigma=None) -> ScalingFit:
    """Weighted least squares of ``log gap`` against ``log N``.

    With ``sigma`` the weights are ``gap / sigma`` and the covariance is taken
    as absolute; without it the fit is unweighted and the covariance is scaled
    by the residual variance.
    """
    sizes, gaps, sigma = _validate_points(sizes, gaps, sigma)
    x = np.log(sizes)
    y = np.log(gaps)
    w = np.ones_like(y) if sigma is None else gaps / sigma
    A = np.column_stack([np.ones_like(x), x]) * w[:, None]
    coef, *_ = np.linalg.lstsq(A, y * w, rcond=None)
    cov = np.linalg.inv(A.T @ A)
    resid = y - (coef[0] + coef[1] * x)
    if sigma is None:
        cov = cov * float(np.sum(resid**2)) / (len(x) - 2)
    return ScalingFit(
        sizes=sizes,
        gaps=gaps,
        sigma=sigma,
        z=float(-coef[1]),
        z_err=float(math.sqrt(cov[1, 1])),
        prefactor=float(math.exp(coef[0])),
        residual=float(math.sqrt(np.mean(resid**2))),
    )


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-6) -> float:
    """Minimizer of a unimodal ``f`` on ``[a, b]`` to within ``tol``."""
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _drift(N, g_c, a, inv_nu):
    return g_c + a * N ** (-inv_nu)


def fit_drift(sizes, g_star) -> tuple[float, float, float, float, float]:
    """Fit ``g*(N) = g_c + a N^(-1/nu)``; returns ``(g_c, nu, a, g_c_err, nu_err)``."""
    sizes = np.asarray(sizes, float)
    g_star = np.asarray(g_star, float)
    if len(sizes) < 3:
        raise InsufficientPointsError(f"the drift fit needs at least 3 sizes, got {len(sizes)}")
    p0 = (g_star[-1], (g_star[0] - g_star[-1]) * sizes[0], 1.0)
    popt, pcov = curve_fit(_drift, sizes, g_star, p0=p0, maxfev=20000)
    g_c, a, inv_nu = (float(v) for v in popt)
    errs = np.sqrt(np.abs(np.diag(pcov))) if np.all(np.isfinite(pcov)) else np.full(3, math.nan)
    nu = 1.0 / inv_nu
    return g_c, nu, a, float(errs[0]), float(errs[2] / inv_nu**2)


def scan_gap_minimum(
    gap: Callable[[float, int], float],
    g_range: tuple[float, float],
    sizes: Sequence[int],
    tol: float = 1e-6,
) -> NuScan:
    """Locate ``g*(N) = argmin_g gap(g, N)`` per size and fit its drift."""
    lo, hi = map(float, g_range)
    if not hi > lo:
        raise InvalidParamsError(f"g_range must be increasing, got {g_range!r}")
    sizes = np.asarray(sorted(int(n) for n in sizes))
    g_star = []
    for n in sizes:
        g = golden_section(lambda x: gap(x, int(n)), lo, hi, tol)
        if g - lo < 2 * tol or hi - g < 2 * tol:
            raise NoBracketError(f"gap at N={n} is monotone on [{lo}, {hi}]; minimum sits at the boundary")
        g_star.append(g)
    g_star = np.array(g_star)
    g_c, nu, a, g_c_err, nu_err = fit_drift(sizes, g_star)
    return NuScan(sizes, g_star, g_c, nu, a, g_c_err, nu_err, (lo, hi))


def tfim_gap_function(J: float = 1.0) -> Callable[[float, int], float]:
    from .tfim import TfimParams, tfim_gap

    return lambda g, N: tfim_gap(TfimParams(g=g, N=N, J=J))


def lrk_gap_function(alpha: float = 2.5, beta: float = 1.5, J: float = 1.0) -> Callable[[float, int], float]:
    """Gap as a function of ``mu``."""
    from .lrk import LrkParams, lrk_gap

    return lambda mu, N: lrk_gap(LrkParams(mu=mu, N=N, alpha=alpha, beta=beta, J=J))


def ed_gap_function(model: str = "long_range", **couplings) -> Callable[[float, int], float]:
    """Lowest gap of a dense ED Hamiltonian as a function of the transverse coupling ``g``."""
    from . import ed

    if model == "longitudinal":
        return lambda g, N: ed.ground_energy_gap(ed.build_longitudinal(N, g, couplings.get("h", 0.0), couplings.get("J", 1.0)))
    if model == "long_range":
        return lambda g, N: ed.ground_energy_gap(ed.build_long_range(N, g, couplings.get("r", 2.0), couplings.get("J", -1.0)))
    raise InvalidParamsError(f"unknown ED model {model!r}")
