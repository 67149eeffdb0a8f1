"""Linear (Kubo) response of free-fermion chains to a weak parameter change.

Each momentum mode is a two-level system ``eps sz~`` in its own eigenbasis.
A perturbation ``lambda(t) * c . s~`` and an observable ``b . s~`` give, to
first order in ``lambda`` and starting from ``rho = (1 + f_z sz~)/2``,

    <B>(t) = f_z b_z + 2 f_z int_0^t ds lambda(s)
             [ (b_x c_x + b_y c_y) sin 2eps(t-s) + (b_x c_y - b_y c_x) cos 2eps(t-s) ]

(hbar = k_B = 1).  Many-body observables are sums of these per-mode terms.
All time integrals of the drive profiles used here have closed forms.

Eigenbasis coefficients.  With ``cos phi = h_z/eps`` and ``sin phi = h_x/eps``
the bare pseudo-spin operators of a mode are
``sz = cos phi sz~ - sin phi sx~`` and ``sx = sin phi sz~ + cos phi sx~``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import (
    AmplitudeWarning,
    ConditioningWarning,
    DegenerateModeError,
    InvalidParamsError,
    QuadratureError,
    UnevenGridError,
)
from .lrk import LrkParams, lrk_modes
from .modes import TwoLevelMode, mode_arrays
from .tfim import TfimParams, tfim_modes

RESONANCE_TOL = 1e-9
CONDITIONING_TOL = 1e-6
MAX_AMPLITUDE = 0.2
WARN_AMPLITUDE = 0.05


@dataclass(frozen=True)
class QuenchProtocol:
    """Time dependence ``lambda(t)`` of the perturbing parameter.

    ``sudden``: ``lambda(t) = amplitude`` for ``t >= 0``.
    ``cosine``: ``lambda(t) = amplitude * cos(2 * drive_frequency * t)``.
    """

    kind: str = "sudden"
    amplitude: float = 0.01
    drive_frequency: float = 0.0

    def __post_init__(self):
        if self.kind not in ("sudden", "cosine"):
            raise InvalidParamsError(f"protocol kind must be 'sudden' or 'cosine', got {self.kind!r}")
        a = float(self.amplitude)
        if not math.isfinite(a) or abs(a) > MAX_AMPLITUDE:
            raise InvalidParamsError(
                f"quench amplitude must satisfy |amplitude| <= {MAX_AMPLITUDE}, got {self.amplitude!r}"
            )
        if abs(a) > WARN_AMPLITUDE:
            warnings.warn(
                f"amplitude {a} is outside the comfortably linear regime (> {WARN_AMPLITUDE})",
                AmplitudeWarning,
                stacklevel=3,
            )
        w = float(self.drive_frequency)
        if not (math.isfinite(w) and w >= 0):
            raise InvalidParamsError(f"drive_frequency must be finite and >= 0, got {self.drive_frequency!r}")
        if self.kind == "sudden" and w != 0:
            raise InvalidParamsError("a sudden protocol takes no drive_frequency")
        object.__setattr__(self, "amplitude", a)
        object.__setattr__(self, "drive_frequency", w)

    def profile(self, t):
        """``lambda(t) / amplitude``."""
        t = np.asarray(t, dtype=float)
        if self.kind == "sudden":
            return np.ones_like(t)
        return np.cos(2.0 * self.drive_frequency * t)

    def __call__(self, t):
        return self.amplitude * self.profile(t)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "amplitude": self.amplitude, "drive_frequency": self.drive_frequency}


@dataclass(frozen=True)
class ThermalWeights:
    """Per-mode populations ``f_z = -tanh(eps / T)``; exactly ``-1`` at ``T = 0``."""

    f_z: np.ndarray
    temperature: float = 0.0

    @classmethod
    def from_modes(cls, modes: Sequence[TwoLevelMode], temperature: float = 0.0) -> "ThermalWeights":
        if not (math.isfinite(temperature) and temperature >= 0):
            raise InvalidParamsError(f"temperature must be finite and >= 0, got {temperature!r}")
        eps = mode_arrays(modes)[3]
        if temperature == 0:
            f = -np.ones_like(eps)
        else:
            f = -np.tanh(eps / temperature)
        f.setflags(write=False)
        return cls(f, float(temperature))


def thermal_weights(modes, temperature: float) -> ThermalWeights:
    return ThermalWeights.from_modes(modes, temperature)


@dataclass
class TimeSeries:
    """Evenly sampled expectation values ``<B>(t_i)``."""

    times: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        check_time_grid(self.times)
        if self.values.shape != self.times.shape:
            raise InvalidParamsError(
                f"values and times differ in length ({self.values.shape} vs {self.times.shape})"
            )

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def duration(self) -> float:
        """``n * dt``: the record length that sets the frequency resolution."""
        return self.dt * len(self.times)

    def __len__(self):
        return len(self.times)


def check_time_grid(times: np.ndarray, rtol: float = 1e-9) -> float:
    """Validate an evenly spaced, strictly increasing 1-D grid and return its step."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 2:
        raise InvalidParamsError("a time grid needs at least two samples in one dimension")
    steps = np.diff(times)
    dt = (times[-1] - times[0]) / (len(times) - 1)
    if not dt > 0 or np.any(steps <= 0):
        raise UnevenGridError("times must be strictly increasing")
    if np.max(np.abs(steps - dt)) > rtol * max(dt, abs(times[-1]) * 1e-3):
        raise UnevenGridError("times must be evenly spaced")
    return float(dt)


def time_grid(tau: float, n_tau: int) -> np.ndarray:
    """``n_tau`` samples ``t_i = i tau / n_tau``; the record length is exactly ``tau``."""
    if not (tau > 0 and math.isfinite(tau)):
        raise InvalidParamsError(f"tau must be positive, got {tau!r}")
    if int(n_tau) != n_tau or n_tau < 2:
        raise InvalidParamsError(f"n_tau must be an integer >= 2, got {n_tau!r}")
    return np.arange(int(n_tau)) * (float(tau) / int(n_tau))


# --- eigenbasis coefficients -------------------------------------------------


def sz_coefficients(cphi, sphi) -> np.ndarray:
    """Eigenbasis (x, y, z) coefficients of the bare ``sz`` of each mode."""
    cphi, sphi = np.asarray(cphi, float), np.asarray(sphi, float)
    return np.stack([-sphi, np.zeros_like(cphi), cphi], axis=-1)


def sx_coefficients(cphi, sphi) -> np.ndarray:
    cphi, sphi = np.asarray(cphi, float), np.asarray(sphi, float)
    return np.stack([cphi, np.zeros_like(cphi), sphi], axis=-1)


def _field_direction(modes):
    k, h_z, h_x, eps = mode_arrays(modes)
    if np.any(~(eps > 0)):
        raise DegenerateModeError("a mode has zero splitting; its response is undefined")
    return k, eps, h_z / eps, h_x / eps


# --- time kernels ------------------------------------------------------------


def _sudden_kernels(eps: np.ndarray, t: np.ndarray):
    """``int_0^t sin 2eps(t-s) ds`` and ``int_0^t cos 2eps(t-s) ds``."""
    et = np.outer(eps, t)
    s = np.sin(et)
    e = eps[:, None]
    return s * s / e, np.sin(2.0 * et) / (2.0 * e)


def _cosine_kernels(eps: np.ndarray, omega: float, t: np.ndarray, scale: float = 1.0):
    """Same integrals weighted by ``cos(2 omega s)``, with the resonant limit.

    Modes with ``|eps - omega| < RESONANCE_TOL * scale`` use the ``omega -> eps``
    limit of the closed form.
    """
    if omega == 0.0:
        return _sudden_kernels(eps, t)
    detune = eps - omega
    resonant = np.abs(detune) < RESONANCE_TOL * scale
    near = (~resonant) & (np.abs(detune) < CONDITIONING_TOL * scale)
    if np.any(near):
        warnings.warn(
            f"drive frequency {omega} lies within {CONDITIONING_TOL} of a mode energy; "
            "the non-resonant closed form is poorly conditioned there",
            ConditioningWarning,
            stacklevel=3,
        )
    e = eps[:, None]
    tt = t[None, :]
    c2w, s2w = np.cos(2.0 * omega * tt), np.sin(2.0 * omega * tt)
    c2e, s2e = np.cos(2.0 * e * tt), np.sin(2.0 * e * tt)
    with np.errstate(divide="ignore", invalid="ignore"):
        dm = np.where(resonant, 1.0, detune)[:, None]
        i_sin = e * (c2w - c2e) / (2.0 * (e * e - omega * omega))
        i_cos = 0.5 * ((s2e - s2w) / (2.0 * dm) + (s2e + s2w) / (2.0 * (e + omega)))
    if np.any(resonant):
        r = resonant
        i_sin[r] = 0.5 * tt * s2e[r]
        i_cos[r] = 0.5 * (tt * c2e[r] + s2e[r] / (2.0 * e[r]))
    return i_sin, i_cos


def _kernels(eps, protocol: QuenchProtocol, t, scale=1.0):
    if protocol.kind == "sudden":
        return _sudden_kernels(eps, t)
    return _cosine_kernels(eps, protocol.drive_frequency, t, scale)


def mode_contributions(eps, obs, pert, f_z, protocol: QuenchProtocol, times, scale=1.0) -> np.ndarray:
    """Per-mode linear response, shape ``(n_modes, n_times)``.

    ``obs`` and ``pert`` are ``(n_modes, 3)`` eigenbasis coefficients; ``pert``
    is per unit of ``protocol.amplitude``.
    """
    eps = np.asarray(eps, float)
    obs = np.asarray(obs, float)
    pert = np.asarray(pert, float) * protocol.amplitude
    f_z = np.broadcast_to(np.asarray(f_z, float), eps.shape)
    i_sin, i_cos = _kernels(eps, protocol, np.asarray(times, float), scale)
    w_sin = 2.0 * f_z * (obs[:, 0] * pert[:, 0] + obs[:, 1] * pert[:, 1])
    w_cos = 2.0 * f_z * (obs[:, 0] * pert[:, 1] - obs[:, 1] * pert[:, 0])
    return (f_z * obs[:, 2])[:, None] + w_sin[:, None] * i_sin + w_cos[:, None] * i_cos


def _assemble(eps, obs, pert, f_z, protocol, times, scale):
    # rows are in ascending k; a fixed-order reduction keeps runs bit-reproducible
    return mode_contributions(eps, obs, pert, f_z, protocol, times, scale).sum(axis=0)


# --- single mode ---------------------------------------------------------------


def single_mode_response(
    mode: TwoLevelMode,
    coeffs: Callable[[float], Sequence[float]],
    obs: Sequence[float],
    f_z: float,
    t,
) -> np.ndarray | float:
    """Evaluate the single-mode Kubo integral by adaptive quadrature.

    Parameters
    ----------
    mode : TwoLevelMode
        Supplies the splitting ``eps``; coefficients are in its eigenbasis.
    coeffs : callable
        ``s -> (c_x, c_y, c_z)``, the perturbation at time ``s`` (energy units,
        amplitude included).
    obs : sequence of 3 floats
        ``(b_x, b_y, b_z)``.
    f_z : float
        Initial population imbalance along ``sz~``.
    t : float or array
        Evaluation time(s).

    This is the general form; the assembled observables use closed-form
    integrals of the same expression.
    """
    eps = mode.epsilon
    if not eps > 0:
        raise DegenerateModeError(f"mode at k={mode.k} has zero splitting")
    b = np.asarray(obs, dtype=float)

    def integrand(s, tt, which):
        c = np.asarray(coeffs(s), dtype=float)
        if which == "sin":
            return (b[0] * c[0] + b[1] * c[1]) * math.sin(2.0 * eps * (tt - s))
        return (b[0] * c[1] - b[1] * c[0]) * math.cos(2.0 * eps * (tt - s))

    def one(tt):
        if tt == 0:
            return f_z * b[2]
        limit = max(100, int(4 * eps * tt))
        total = 0.0
        for which in ("sin", "cos"):
            val, err = integrate.quad(integrand, 0.0, tt, args=(tt, which), limit=limit, epsabs=1e-13, epsrel=1e-11)
            total += val
        return f_z * b[2] + 2.0 * f_z * total

    ts = np.asarray(t, dtype=float)
    if ts.ndim == 0:
        return float(one(float(ts)))
    return np.array([one(float(x)) for x in ts])


# --- transverse-field Ising -------------------------------------------------------


def _tfim_parts(p: TfimParams):
    modes = tfim_modes(p)
    k, eps, cphi, sphi = _field_direction(modes)
    pert = 2.0 * p.J * sz_coefficients(cphi, sphi)  # delta h_z = 2 J delta g
    return modes, k, eps, cphi, sphi, pert


def _series(times, values, **meta) -> TimeSeries:
    return TimeSeries(np.asarray(times, float), values, dict(meta))


def mx_response(p: TfimParams, protocol: QuenchProtocol, times, weights: ThermalWeights | None = None) -> TimeSeries:
    """Transverse magnetisation ``M_x = (1/N) sum_j sx_j`` after ``g -> g + lambda(t)``.

    ``M_x`` restricted to a mode is ``-(2/N)`` times its bare ``sz``.
    """
    times = np.asarray(times, float)
    check_time_grid(times)
    modes, k, eps, cphi, sphi, pert = _tfim_parts(p)
    if weights is None:
        weights = ThermalWeights.from_modes(modes, 0.0)
    obs = -(2.0 / p.N) * sz_coefficients(cphi, sphi)
    values = _assemble(eps, obs, pert, weights.f_z, protocol, times, p.J)
    return _series(
        times,
        values,
        model="tfim",
        observable="M_x",
        N=p.N,
        g=p.g,
        J=p.J,
        temperature=weights.temperature,
        protocol=protocol.as_dict(),
    )


def mx_response_sudden(p: TfimParams, dg: float, times, weights: ThermalWeights | None = None) -> TimeSeries:
    """``<M_x>(t) = (2/N) sum_k [cos phi_k + 4 J dg sin^2 phi_k sin^2(eps_k t) / eps_k]`` at ``T = 0``.

    In terms of the mixing angle, ``cos phi = -cos 2theta`` and
    ``sin^2 phi = sin^2 2theta``.
    """
    return mx_response(p, QuenchProtocol("sudden", dg), times, weights)


def mx_response_thermal(p: TfimParams, dg: float, temperature: float, times) -> TimeSeries:
    """Sudden-quench ``<M_x>`` from a thermal state; ``T = 0`` reproduces the ground-state series exactly."""
    w = ThermalWeights.from_modes(tfim_modes(p), temperature)
    return mx_response(p, QuenchProtocol("sudden", dg), times, w)


def mx_response_cosine(p: TfimParams, dg: float, omega_d: float, times) -> TimeSeries:
    """``<M_x>`` under ``g(t) = g0 + dg cos(2 omega_d t)``.

    Non-resonant modes carry ``eps (cos 2w t - cos 2eps t) / (2 (eps^2 - w^2))``;
    a mode within ``1e-9 J`` of ``omega_d`` switches to the resonant
    ``t sin(2 eps t) / 2`` branch.
    """
    return mx_response(p, QuenchProtocol("cosine", dg, omega_d), times)


def mzz_response(p: TfimParams, protocol: QuenchProtocol, times) -> TimeSeries:
    """Nearest-neighbour correlator ``M_zz = (1/N) sum_j sz_j sz_{j+1}``.

    Per mode ``M_zz = (2/N) [cos(kb) sz - sin(kb) sx]``.
    """
    times = np.asarray(times, float)
    check_time_grid(times)
    modes, k, eps, cphi, sphi, pert = _tfim_parts(p)
    kb = k * p.b
    obs = (2.0 / p.N) * (
        np.cos(kb)[:, None] * sz_coefficients(cphi, sphi) - np.sin(kb)[:, None] * sx_coefficients(cphi, sphi)
    )
    values = _assemble(eps, obs, pert, -1.0, protocol, times, p.J)
    return _series(times, values, model="tfim", observable="M_zz", N=p.N, g=p.g, J=p.J, protocol=protocol.as_dict())


def mzz_response_sudden(p: TfimParams, dg: float, times) -> TimeSeries:
    return mzz_response(p, QuenchProtocol("sudden", dg), times)


def mx_thermodynamic_limit(g0: float, dg: float, t, J: float = 1.0, tol: float = 1e-8):
    """``N -> infinity`` limit of the sudden-quench ``<M_x>(t)`` by quadrature over ``k in (0, pi)``.

    Raises ``QuadratureError`` if QUADPACK's error estimate exceeds ``tol``.
    """
    if not g0 > 0:
        raise InvalidParamsError(f"g0 must be positive, got {g0!r}")

    def integrand(k, tt):
        eps = 2.0 * J * math.sqrt(g0 * g0 + 1.0 - 2.0 * g0 * math.cos(k))
        if eps == 0.0:
            return 0.0
        cphi = 2.0 * J * (g0 - math.cos(k)) / eps
        sphi = 2.0 * J * math.sin(k) / eps
        s = math.sin(eps * tt)
        return cphi + 4.0 * J * dg * sphi * sphi * s * s / eps

    eps_max = 2.0 * J * (1.0 + g0)

    def one(tt):
        limit = max(200, int(8 * eps_max * abs(tt)))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(integrand, 0.0, math.pi, args=(tt,), epsabs=tol / 100, epsrel=0.0, limit=limit)
        if not err <= tol:
            raise QuadratureError(f"quadrature error estimate {err:.2e} exceeds {tol:.0e} at t={tt}")
        return val / math.pi

    ts = np.asarray(t, float)
    if ts.ndim == 0:
        return one(float(ts))
    return np.array([one(float(x)) for x in ts])


# --- long-range Kitaev -------------------------------------------------------------


def nf_response(p: LrkParams, protocol: QuenchProtocol, times, weights: ThermalWeights | None = None) -> TimeSeries:
    """Fermion number ``N_f = sum_{k>0} sz_k`` after ``mu -> mu + J lambda(t)``.

    The chemical potential enters each mode as ``mu/2``, so the perturbation
    is ``(J lambda / 2) sz``; ``protocol.amplitude`` is ``dmu / J``.
    """
    times = np.asarray(times, float)
    check_time_grid(times)
    modes = lrk_modes(p)
    k, eps, cphi, sphi = _field_direction(modes)
    if weights is None:
        weights = ThermalWeights.from_modes(modes, 0.0)
    pert = 0.5 * p.J * sz_coefficients(cphi, sphi)
    obs = sz_coefficients(cphi, sphi)
    values = _assemble(eps, obs, pert, weights.f_z, protocol, times, p.J)
    return _series(
        times,
        values,
        model="lrk",
        observable="N_f",
        N=p.N,
        mu=p.mu,
        alpha=p.alpha,
        beta=p.beta,
        J=p.J,
        temperature=weights.temperature,
        protocol=protocol.as_dict(),
    )


def nf_response_sudden(p: LrkParams, dmu: float, times) -> TimeSeries:
    """``<N_f>(t) = -sum_k [cos phi_k + dmu sin^2 phi_k sin^2(eps_k t) / eps_k]``; ``dmu`` in energy units."""
    return nf_response(p, QuenchProtocol("sudden", dmu / p.J), times)
