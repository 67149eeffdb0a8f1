"""Exact (non-perturbative) dynamics of the decoupled modes.

Used as the reference that every linear-response formula is checked against.
Each mode is a Bloch vector ``r`` in the eigenframe of the unperturbed mode,
obeying ``dr/dt = 2 B(t) x r`` with

    B(t) = (-dh(t) sin phi, 0, eps + dh(t) cos phi),   dh(t) = coupling * lambda(t).

Sudden quenches are a single exact rotation.  Driven protocols are stepped
with the fourth-order Magnus integrator (two Gauss points), whose steps are
exact rotations, so the Bloch norm is conserved to round-off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GridMismatchError, InvalidParamsError, StepSizeError
from .lrk import LrkParams, lrk_modes
from .modes import TwoLevelMode, mode_arrays
from .response import (
    QuenchProtocol,
    ThermalWeights,
    TimeSeries,
    check_time_grid,
    sx_coefficients,
    sz_coefficients,
)
from .tfim import TfimParams, tfim_modes

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class ModeState:
    r_x: float
    r_y: float
    r_z: float

    @property
    def norm(self) -> float:
        return math.sqrt(self.r_x**2 + self.r_y**2 + self.r_z**2)


@dataclass
class ModeTrajectory:
    """Bloch vectors of one mode on a time grid; indexing yields ``ModeState``."""

    times: np.ndarray
    bloch: np.ndarray

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i) -> ModeState:
        return ModeState(*map(float, self.bloch[i]))


def _rotate(r: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Rotate vectors ``r`` by rotation vectors ``w`` (angle ``|w|`` about ``w``), Rodrigues form."""
    angle = np.linalg.norm(w, axis=-1, keepdims=True)
    safe = np.where(angle > 0, angle, 1.0)
    n = w / safe
    c, s = np.cos(angle), np.sin(angle)
    ndotr = np.sum(n * r, axis=-1, keepdims=True)
    return r * c + np.cross(n, r) * s + n * ndotr * (1.0 - c)


def _field(eps, cphi, sphi, dh):
    """Field in the eigenframe, broadcasting ``dh`` against the mode axis."""
    dh = np.asarray(dh, float)
    return np.stack([-dh * sphi, np.zeros_like(dh * sphi), eps + dh * cphi], axis=-1)


def _magnus_run(r0, eps, cphi, sphi, coupling, protocol, segments, n_sub):
    """Integrate through ``segments`` (pairs of times), ``n_sub`` Magnus steps each."""
    r = r0.copy()
    out = []
    c1, c2 = 0.5 - _SQRT3 / 6.0, 0.5 + _SQRT3 / 6.0
    for t_start, t_end in segments:
        h = (t_end - t_start) / n_sub
        if h > 0:
            for i in range(n_sub):
                t0 = t_start + i * h
                w1 = 2.0 * _field(eps, cphi, sphi, coupling * protocol(t0 + c1 * h))
                w2 = 2.0 * _field(eps, cphi, sphi, coupling * protocol(t0 + c2 * h))
                omega = 0.5 * h * (w1 + w2) - (_SQRT3 / 12.0) * h * h * np.cross(w1, w2)
                r = _rotate(r, omega)
        out.append(r.copy())
    return np.stack(out, axis=1)


def evolve_modes(
    eps,
    cphi,
    sphi,
    protocol: QuenchProtocol,
    f_z,
    times,
    *,
    coupling: float,
    tol: float = 1e-9,
    max_refinements: int = 10,
) -> np.ndarray:
    """Bloch vectors of many modes, shape ``(n_modes, n_times, 3)``.

    The system starts at ``t = 0`` in ``(1 + f_z sz~)/2`` and the protocol
    switches on at ``t = 0``; ``times`` must be ``>= 0``.
    """
    eps = np.atleast_1d(np.asarray(eps, float))
    cphi = np.atleast_1d(np.asarray(cphi, float))
    sphi = np.atleast_1d(np.asarray(sphi, float))
    times = np.asarray(times, float)
    check_time_grid(times)
    if times[0] < 0:
        raise InvalidParamsError("times must be non-negative; the quench happens at t = 0")
    f_z = np.broadcast_to(np.asarray(f_z, float), eps.shape)
    r0 = np.stack([np.zeros_like(eps), np.zeros_like(eps), f_z], axis=-1)

    if protocol.kind == "sudden":
        b = _field(eps, cphi, sphi, coupling * protocol.amplitude)  # (n, 3)
        w = 2.0 * b[:, None, :] * times[None, :, None]
        return _rotate(np.broadcast_to(r0[:, None, :], w.shape), w)

    dt = times[1] - times[0]
    segments = [(0.0, times[0])] + list(zip(times[:-1], times[1:]))
    b_max = float(np.max(eps)) + abs(coupling * protocol.amplitude)
    n_sub = max(1, math.ceil(dt / (0.05 / b_max)))
    prev = _magnus_run(r0, eps, cphi, sphi, coupling, protocol, segments, n_sub)
    for _ in range(max_refinements):
        n_sub *= 2
        cur = _magnus_run(r0, eps, cphi, sphi, coupling, protocol, segments, n_sub)
        if np.max(np.abs(cur - prev)) < tol:
            return cur
        prev = cur
    raise StepSizeError(f"Magnus stepping did not converge to {tol:g} after {max_refinements} refinements")


def evolve_mode(
    mode: TwoLevelMode,
    protocol: QuenchProtocol,
    f_z: float,
    times,
    *,
    coupling: float,
    tol: float = 1e-9,
) -> ModeTrajectory:
    """Exact evolution of one mode.

    ``coupling`` converts the protocol amplitude into the shift of the bare
    ``h_z``: ``2J`` for ``g -> g + dg`` in the Ising chain, ``J/2`` for
    ``mu -> mu + J dmu`` in the Kitaev chain.
    """
    times = np.asarray(times, float)
    bloch = evolve_modes(
        mode.epsilon, mode.cos_field, mode.sin_field, protocol, f_z, times, coupling=coupling, tol=tol
    )
    return ModeTrajectory(times, bloch[0])


def assemble_observable(
    trajectories: Sequence[ModeTrajectory] | np.ndarray,
    obs,
    n_sites: int,
    *,
    times=None,
    scale: float | None = None,
) -> TimeSeries:
    """Sum ``b_k . r_k(t)`` over modes, times ``scale`` (default ``2/N``).

    ``trajectories`` is either a list of ``ModeTrajectory`` on one common grid
    or an ``(n_modes, n_times, 3)`` array together with ``times``.
    """
    if isinstance(trajectories, np.ndarray):
        if times is None:
            raise InvalidParamsError("times are required when passing a raw Bloch array")
        bloch = trajectories
        times = np.asarray(times, float)
        if bloch.shape[1] != len(times):
            raise GridMismatchError("Bloch array and time grid differ in length")
    else:
        trajs = list(trajectories)
        if not trajs:
            raise InvalidParamsError("no trajectories to assemble")
        times = trajs[0].times
        for tr in trajs[1:]:
            if tr.times.shape != times.shape or not np.array_equal(tr.times, times):
                raise GridMismatchError("all modes must be evolved on the same time grid")
        bloch = np.stack([tr.bloch for tr in trajs])
    obs = np.asarray(obs, float).reshape(-1, 3)
    if obs.shape[0] != bloch.shape[0]:
        raise GridMismatchError(f"{obs.shape[0]} observable rows for {bloch.shape[0]} modes")
    if scale is None:
        scale = 2.0 / n_sites
    values = scale * np.einsum("kj,ktj->kt", obs, bloch).sum(axis=0)
    return TimeSeries(times, values, {"N": n_sites, "source": "exact"})


def _arrays(modes):
    _, h_z, h_x, eps = mode_arrays(modes)
    return eps, h_z / eps, h_x / eps


def exact_mx_response(p: TfimParams, protocol: QuenchProtocol, times, temperature: float = 0.0) -> TimeSeries:
    """Exact ``<M_x>(t)`` of the Ising chain after ``g -> g + lambda(t)``."""
    modes = tfim_modes(p)
    eps, cphi, sphi = _arrays(modes)
    f_z = ThermalWeights.from_modes(modes, temperature).f_z
    bloch = evolve_modes(eps, cphi, sphi, protocol, f_z, times, coupling=2.0 * p.J)
    series = assemble_observable(bloch, -sz_coefficients(cphi, sphi), p.N, times=times)
    series.metadata.update(model="tfim", observable="M_x", g=p.g, protocol=protocol.as_dict())
    return series


def exact_mzz_response(p: TfimParams, protocol: QuenchProtocol, times) -> TimeSeries:
    modes = tfim_modes(p)
    eps, cphi, sphi = _arrays(modes)
    kb = np.array([m.k for m in modes]) * p.b
    obs = np.cos(kb)[:, None] * sz_coefficients(cphi, sphi) - np.sin(kb)[:, None] * sx_coefficients(cphi, sphi)
    bloch = evolve_modes(eps, cphi, sphi, protocol, -1.0, times, coupling=2.0 * p.J)
    series = assemble_observable(bloch, obs, p.N, times=times)
    series.metadata.update(model="tfim", observable="M_zz", g=p.g, protocol=protocol.as_dict())
    return series


def exact_nf_response(p: LrkParams, protocol: QuenchProtocol, times, temperature: float = 0.0) -> TimeSeries:
    """Exact ``<N_f>(t)`` of the Kitaev chain after ``mu -> mu + J lambda(t)``."""
    modes = lrk_modes(p)
    eps, cphi, sphi = _arrays(modes)
    f_z = ThermalWeights.from_modes(modes, temperature).f_z
    bloch = evolve_modes(eps, cphi, sphi, protocol, f_z, times, coupling=0.5 * p.J)
    series = assemble_observable(bloch, sz_coefficients(cphi, sphi), p.N, times=times, scale=1.0)
    series.metadata.update(model="lrk", observable="N_f", mu=p.mu, protocol=protocol.as_dict())
    return series
