"""Spectra of response traces and the lowest-frequency peak."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParamsError, NoPeakFoundError, TooFewSamplesError
from .io import read_csv, read_json, write_csv, write_json
from .response import TimeSeries, check_time_grid

MIN_SAMPLES = 64
DEFAULT_NOISE_FLOOR = 0.05
WINDOWS = ("none", "hann")
# peaks below this fraction of the largest magnitude are round-off, whatever the floor
_ROUNDOFF = 1e-10


@dataclass
class Spectrum:
    """``|S(omega_j)|`` on ``omega_j = 2 pi j / (pad * tau)``."""

    frequencies: np.ndarray
    magnitudes: np.ndarray
    resolution: float
    metadata: dict = field(default_factory=dict)
    signal_scale: float = 0.0

    def __post_init__(self):
        self.frequencies = np.asarray(self.frequencies, float)
        self.magnitudes = np.asarray(self.magnitudes, float)
        if self.frequencies.shape != self.magnitudes.shape or self.frequencies.ndim != 1:
            raise InvalidParamsError("frequencies and magnitudes must be 1-D and of equal length")
        if len(self.frequencies) and (self.frequencies[0] < 0 or np.any(np.diff(self.frequencies) <= 0)):
            raise InvalidParamsError("frequencies must be non-negative and ascending")

    @property
    def bin_width(self) -> float:
        return float(self.frequencies[1] - self.frequencies[0])

    def __len__(self):
        return len(self.frequencies)


@dataclass(frozen=True)
class PeakEstimate:
    omega_m: float
    amplitude: float
    uncertainty: float
    refined: bool
    omega_bin: float
    index: int

    def as_dict(self) -> dict:
        return {
            "omega_m": self.omega_m,
            "amplitude": self.amplitude,
            "uncertainty": self.uncertainty,
            "refined": self.refined,
            "omega_bin": self.omega_bin,
            "index": self.index,
        }


def compute_spectrum(series: TimeSeries, window: str = "none", pad_factor: int = 1) -> Spectrum:
    """Magnitude of the discrete transform of the mean-subtracted series, scaled by ``dt``.

    ``pad_factor > 1`` zero-pads to a finer frequency grid without adding
    resolution.
    """
    times = np.asarray(series.times, float)
    values = np.asarray(series.values, float)
    n = len(values)
    if n < MIN_SAMPLES:
        raise TooFewSamplesError(f"need at least {MIN_SAMPLES} samples, got {n}")
    dt = check_time_grid(times)
    if window not in WINDOWS:
        raise InvalidParamsError(f"window must be one of {WINDOWS}, got {window!r}")
    if int(pad_factor) != pad_factor or pad_factor < 1:
        raise InvalidParamsError(f"pad_factor must be a positive integer, got {pad_factor!r}")
    pad_factor = int(pad_factor)

    x = values - values.mean()
    if window == "hann":
        x = x * np.hanning(n)
    n_fft = n * pad_factor
    mags = dt * np.abs(np.fft.rfft(x, n=n_fft))
    freqs = 2.0 * np.pi * np.fft.rfftfreq(n_fft, d=dt)
    meta = dict(series.metadata)
    meta.update(window=window, pad_factor=pad_factor, n_samples=n, dt=dt)
    # magnitude a constant offset of the raw series would have had; anchors the round-off floor
    scale = dt * n * float(np.max(np.abs(values)))
    return Spectrum(freqs, mags, 2.0 * np.pi / (n * dt), meta, scale)


def lowest_peak(
    s: Spectrum,
    noise_floor: float = DEFAULT_NOISE_FLOOR,
    min_amplitude: float = 0.0,
    refine: bool = True,
) -> PeakEstimate:
    """Smallest-frequency local maximum above ``noise_floor * max`` and ``min_amplitude``.

    A local maximum must dominate one resolution cell (``2 pi / tau``) on
    each side, so the sidelobes that zero-padding exposes do not count.
    With ``refine`` the position is moved to the vertex of the parabola
    through the peak bin and its two neighbours.
    """
    if len(s) < 3:
        raise InvalidParamsError("spectrum too short to contain a peak")
    if not (0 <= noise_floor < 1):
        raise InvalidParamsError(f"noise_floor must be in [0, 1), got {noise_floor!r}")
    if min_amplitude < 0:
        raise InvalidParamsError(f"min_amplitude must be >= 0, got {min_amplitude!r}")
    m = s.magnitudes
    top = float(m[1:].max())
    threshold = max(noise_floor * top, min_amplitude, _ROUNDOFF * max(top, s.signal_scale))
    if not top > threshold:
        raise NoPeakFoundError(f"no nonzero-frequency content above {threshold:.3g}")

    h = max(1, int(round(s.resolution / s.bin_width)))
    inner = m[1:-1]
    is_max = (inner > m[:-2]) & (inner >= m[2:]) & (inner > threshold)
    j = None
    for cand in np.flatnonzero(is_max) + 1:
        if m[cand] >= m[max(cand - h, 1) : cand + h + 1].max():
            j = int(cand)
            break
    if j is None:
        raise NoPeakFoundError(
            f"no local maximum above threshold {threshold:.3g} (largest magnitude {top:.3g})"
        )
    width = s.bin_width
    omega_bin = float(s.frequencies[j])
    omega = omega_bin
    if refine:
        a, b, c = m[j - 1], m[j], m[j + 1]
        denom = a - 2.0 * b + c
        if denom < 0:
            omega = omega_bin + 0.5 * (a - c) / denom * width
    return PeakEstimate(
        omega_m=float(omega),
        amplitude=float(m[j]),
        uncertainty=0.5 * s.resolution,
        refined=bool(refine),
        omega_bin=omega_bin,
        index=j,
    )


def spectrum_to_csv(s: Spectrum, path):
    meta = dict(s.metadata)
    meta["resolution"] = s.resolution
    meta["signal_scale"] = s.signal_scale
    return write_csv(path, {"omega": s.frequencies, "magnitude": s.magnitudes}, meta)


def spectrum_from_csv(path) -> Spectrum:
    meta, cols = read_csv(path)
    resolution = meta.pop("resolution", None)
    scale = float(meta.pop("signal_scale", 0.0))
    freqs = cols["omega"]
    if resolution is None:
        resolution = float(freqs[1] - freqs[0])
    return Spectrum(freqs, cols["magnitude"], float(resolution), meta, scale)


def spectrum_to_json(s: Spectrum, path):
    return write_json(
        path,
        {
            "omega": s.frequencies,
            "magnitude": s.magnitudes,
            "resolution": s.resolution,
            "signal_scale": s.signal_scale,
            "metadata": s.metadata,
        },
    )


def spectrum_from_json(path) -> Spectrum:
    d = read_json(path)
    return Spectrum(
        np.array(d["omega"], float),
        np.array(d["magnitude"], float),
        float(d["resolution"]),
        d.get("metadata", {}),
        float(d.get("signal_scale", 0.0)),
    )


def nyquist(dt: float) -> float:
    return math.pi / dt
