"""Run configuration and the respond -> spectrum -> scaling pipeline."""

from __future__ import annotations

import configparser
import contextlib
import math
import os
import random
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from . import ed
from .errors import ConfigError, InvalidParamsError, NoPeakFoundError, NumericError
from .io import read_csv, read_json, sha256, write_csv, write_json
from .lrk import LrkParams, lrk_gap, lrk_modes
from .oracle import exact_mx_response, exact_mzz_response, exact_nf_response
from .response import (
    QuenchProtocol,
    ThermalWeights,
    TimeSeries,
    mx_response,
    mzz_response,
    nf_response,
    time_grid,
)
from .scaling import ScalingFit, fit_exponent
from .spectral import WINDOWS, PeakEstimate, compute_spectrum, lowest_peak, spectrum_to_csv
from .tfim import TfimParams, tfim_gap, tfim_modes, tfim_sector_gap

OUTPUT_ROOT_ENV = "QUENCHGAP_OUTPUT_ROOT"
MODELS = ("tfim", "lrk", "longitudinal", "long_range")
FREE_FERMION = ("tfim", "lrk")

_MODEL_DEFAULTS = {
    "tfim": {"g": 1.0, "J": 1.0, "observable": "M_x"},
    "lrk": {"mu": 2.0, "alpha": 2.5, "beta": 1.5, "J": 1.0},
    "longitudinal": {"g": 1.0, "J": 1.0},
    "long_range": {"g": 2.52, "r": 2.0, "J": -1.0},
}
_DEFAULT_SIZES = {
    "tfim": (8, 12, 16, 20, 28, 40),
    "lrk": (8, 12, 16, 20, 28, 40),
    "longitudinal": (6, 8, 10, 12),
    "long_range": (6, 8, 10, 12),
}
_DEFAULT_AMPLITUDE = {"tfim": 0.01, "lrk": 0.01, "longitudinal": 1e-3, "long_range": 0.01}
# ED traces carry many-body frequencies far above the gap; sample finely enough not to alias them
_DEFAULT_N_TAU = {"tfim": 1000, "lrk": 1000, "longitudinal": 32768, "long_range": 32768}

_SECTIONS = {
    "model": {"name", "sizes", "g", "J", "mu", "alpha", "beta", "r", "observable"},
    "protocol": {"kind", "amplitude", "drive_frequency", "temperature"},
    "sampling": {"tau", "n_tau"},
    "spectrum": {"window", "noise_floor", "min_amplitude", "refine"},
    "output": {"directory", "with_oracle", "workers"},
}


@dataclass(frozen=True)
class RunConfig:
    model: str = "tfim"
    params: dict = field(default_factory=dict)
    sizes: tuple = ()
    kind: str = "sudden"
    amplitude: float | None = None
    drive_frequency: float = 0.0
    temperature: float = 0.0
    tau: float = 500.0
    n_tau: int | None = None
    window: str = "none"
    noise_floor: float = 0.05
    min_amplitude: float = 0.0
    refine: bool = True
    output_dir: str = "run"
    with_oracle: bool = False
    workers: int = 1

    def resolved(self) -> "RunConfig":
        """Fill model-dependent defaults and validate; raises ``ConfigError`` naming the bad key."""
        if self.model not in MODELS:
            raise ConfigError(f"model.name: unknown model {self.model!r}; expected one of {MODELS}")
        params = dict(_MODEL_DEFAULTS[self.model])
        for key, value in self.params.items():
            if key not in params:
                raise ConfigError(f"model.{key}: not a parameter of model {self.model!r}")
            params[key] = value
        cfg = replace(
            self,
            params=params,
            sizes=tuple(int(n) for n in (self.sizes or _DEFAULT_SIZES[self.model])),
            amplitude=_DEFAULT_AMPLITUDE[self.model] if self.amplitude is None else float(self.amplitude),
            n_tau=_DEFAULT_N_TAU[self.model] if self.n_tau is None else self.n_tau,
        )
        cfg._validate()
        return cfg

    def _validate(self):
        def bad(key, msg):
            raise ConfigError(f"{key}: {msg}")

        if len(self.sizes) == 0:
            bad("model.sizes", "at least one size is required")
        if len(set(self.sizes)) != len(self.sizes):
            bad("model.sizes", "sizes must be distinct")
        if not (isinstance(self.tau, (int, float)) and math.isfinite(self.tau) and self.tau > 0):
            bad("sampling.tau", f"must be positive, got {self.tau!r}")
        if int(self.n_tau) != self.n_tau or self.n_tau < 64:
            bad("sampling.n_tau", f"must be an integer >= 64, got {self.n_tau!r}")
        if self.window not in WINDOWS:
            bad("spectrum.window", f"must be one of {WINDOWS}, got {self.window!r}")
        if not (0 <= self.noise_floor < 1):
            bad("spectrum.noise_floor", f"must be in [0, 1), got {self.noise_floor!r}")
        if not self.min_amplitude >= 0:
            bad("spectrum.min_amplitude", f"must be >= 0, got {self.min_amplitude!r}")
        if not (math.isfinite(self.temperature) and self.temperature >= 0):
            bad("protocol.temperature", f"must be finite and >= 0, got {self.temperature!r}")
        if int(self.workers) != self.workers or self.workers < 1:
            bad("output.workers", f"must be a positive integer, got {self.workers!r}")
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                QuenchProtocol(self.kind, self.amplitude, self.drive_frequency)
        except InvalidParamsError as exc:
            bad("protocol", str(exc))
        if self.model not in FREE_FERMION:
            if self.kind != "sudden":
                bad("protocol.kind", "exact-diagonalization models support sudden quenches only")
            if self.temperature != 0:
                bad("protocol.temperature", "exact-diagonalization models start from the ground state")
            if self.with_oracle:
                bad("output.with_oracle", "the exact-dynamics oracle covers the free-fermion models only")
        if self.model == "tfim" and self.params["observable"] not in ("M_x", "M_zz"):
            bad("model.observable", f"must be M_x or M_zz, got {self.params['observable']!r}")
        if self.model == "tfim" and self.params["observable"] == "M_zz" and self.temperature != 0:
            bad("protocol.temperature", "M_zz is evaluated from the ground state only")
        for n in self.sizes:
            try:
                self._check_size(n)
            except InvalidParamsError as exc:
                bad("model.sizes", f"N={n}: {exc}")

    def _check_size(self, N):
        p = self.params
        if self.model == "tfim":
            TfimParams(g=p["g"], N=N, J=p["J"])
        elif self.model == "lrk":
            LrkParams(mu=p["mu"], N=N, alpha=p["alpha"], beta=p["beta"], J=p["J"])
        else:
            ed._check_size(N)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["sizes"] = list(self.sizes)
        return d


def _parse_bool(key, value):
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _parse_float(key, value):
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None


def _parse_int(key, value):
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def parse_sizes(text: str, key: str = "model.sizes") -> tuple:
    try:
        return tuple(int(s) for s in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"{key}: expected integers, got {text!r}") from None


def load_config(path) -> RunConfig:
    """Read an INI file with sections ``model``, ``protocol``, ``sampling``, ``spectrum``, ``output``."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_mapping({s: dict(cp[s]) for s in cp.sections()})


def config_from_mapping(sections: dict) -> RunConfig:
    for name, body in sections.items():
        if name not in _SECTIONS:
            raise ConfigError(f"{name}: unknown section; expected one of {sorted(_SECTIONS)}")
        for key in body:
            if key not in _SECTIONS[name]:
                raise ConfigError(f"{name}.{key}: unknown key")
    m = sections.get("model", {})
    pr = sections.get("protocol", {})
    sa = sections.get("sampling", {})
    sp = sections.get("spectrum", {})
    out = sections.get("output", {})
    params = {}
    for key in ("g", "J", "mu", "alpha", "beta", "r"):
        if key in m:
            params[key] = _parse_float(f"model.{key}", m[key])
    if "observable" in m:
        params["observable"] = m["observable"].strip()
    kw = {}
    if "amplitude" in pr:
        kw["amplitude"] = _parse_float("protocol.amplitude", pr["amplitude"])
    if "n_tau" in sa:
        kw["n_tau"] = _parse_int("sampling.n_tau", sa["n_tau"])
    return RunConfig(
        model=m.get("name", "tfim").strip(),
        params=params,
        sizes=parse_sizes(m["sizes"]) if "sizes" in m else (),
        kind=pr.get("kind", "sudden").strip(),
        drive_frequency=_parse_float("protocol.drive_frequency", pr.get("drive_frequency", "0")),
        temperature=_parse_float("protocol.temperature", pr.get("temperature", "0")),
        tau=_parse_float("sampling.tau", sa.get("tau", "500")),
        window=sp.get("window", "none").strip(),
        noise_floor=_parse_float("spectrum.noise_floor", sp.get("noise_floor", "0.05")),
        min_amplitude=_parse_float("spectrum.min_amplitude", sp.get("min_amplitude", "0")),
        refine=_parse_bool("spectrum.refine", sp.get("refine", "true")),
        output_dir=out.get("directory", "run").strip(),
        with_oracle=_parse_bool("output.with_oracle", out.get("with_oracle", "false")),
        workers=_parse_int("output.workers", out.get("workers", "1")),
        **kw,
    )


def output_path(directory) -> Path:
    """Relative directories are placed under ``$QUENCHGAP_OUTPUT_ROOT`` when it is set."""
    p = Path(directory)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not p.is_absolute():
        p = Path(root) / p
    return p


# --- stages ------------------------------------------------------------------


def respond(cfg: RunConfig, N: int) -> tuple[TimeSeries, TimeSeries | None]:
    """Response trace for one size, and the exact-dynamics trace if requested."""
    p = cfg.params
    times = time_grid(cfg.tau, cfg.n_tau)
    exact = None
    if cfg.model in FREE_FERMION:
        protocol = QuenchProtocol(cfg.kind, cfg.amplitude, cfg.drive_frequency)
        if cfg.model == "tfim":
            tp = TfimParams(g=p["g"], N=N, J=p["J"])
            if p["observable"] == "M_zz":
                series = mzz_response(tp, protocol, times)
                if cfg.with_oracle:
                    exact = exact_mzz_response(tp, protocol, times)
            else:
                w = ThermalWeights.from_modes(tfim_modes(tp), cfg.temperature)
                series = mx_response(tp, protocol, times, w)
                if cfg.with_oracle:
                    exact = exact_mx_response(tp, protocol, times, cfg.temperature)
        else:
            lp = LrkParams(mu=p["mu"], N=N, alpha=p["alpha"], beta=p["beta"], J=p["J"])
            w = ThermalWeights.from_modes(lrk_modes(lp), cfg.temperature)
            series = nf_response(lp, protocol, times, w)
            if cfg.with_oracle:
                exact = exact_nf_response(lp, protocol, times, cfg.temperature)
    elif cfg.model == "longitudinal":
        H0 = ed.build_longitudinal(N, p["g"], 0.0, p["J"])
        H1 = ed.build_longitudinal(N, p["g"], cfg.amplitude, p["J"])
        series = ed.quench_trace(H0, H1, times)
    else:
        H0 = ed.build_long_range(N, p["g"], p["r"], p["J"])
        H1 = ed.build_long_range(N, p["g"] + cfg.amplitude, p["r"], p["J"])
        series = ed.quench_trace(H0, H1, times)
    series.metadata.update(N=N, model=cfg.model)
    return series, exact


def reference_gap(cfg: RunConfig, N: int) -> float | None:
    """Closed-form gap the lowest peak should sit at, where one is known."""
    p = cfg.params
    if cfg.model == "tfim":
        return tfim_gap(TfimParams(g=p["g"], N=N, J=p["J"]))
    if cfg.model == "lrk":
        return lrk_gap(LrkParams(mu=p["mu"], N=N, alpha=p["alpha"], beta=p["beta"], J=p["J"]))
    if cfg.model == "longitudinal":
        return tfim_sector_gap(TfimParams(g=p["g"], N=N, J=p["J"])) if N >= 4 and N % 2 == 0 else None
    return None


def extract_peak(series: TimeSeries, cfg: RunConfig):
    spec = compute_spectrum(series, window=cfg.window)
    try:
        peak = lowest_peak(spec, cfg.noise_floor, cfg.min_amplitude, cfg.refine)
    except NoPeakFoundError as exc:
        return spec, None, str(exc)
    return spec, peak, None


def fit_peaks(sizes, omegas, tau) -> ScalingFit:
    """Scaling fit with one half-bin ``pi / tau`` as the uncertainty of every gap."""
    return fit_exponent(sizes, omegas, sigma=math.pi / tau)


@dataclass
class SizeResult:
    N: int
    series: TimeSeries
    exact: TimeSeries | None
    spectrum: object
    peak: PeakEstimate | None
    error: str | None
    seconds: float


def run_size(cfg: RunConfig, N: int) -> SizeResult:
    t0 = time.perf_counter()
    series, exact = respond(cfg, N)
    spec, peak, err = extract_peak(series, cfg)
    return SizeResult(N, series, exact, spec, peak, err, time.perf_counter() - t0)


def run_sizes(cfg: RunConfig) -> list[SizeResult]:
    """All sizes, in the configured order regardless of worker count."""
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(lambda n: run_size(cfg, n), cfg.sizes))
    return [run_size(cfg, n) for n in cfg.sizes]


# --- persistence -------------------------------------------------------------


def write_series(path, series: TimeSeries, exact: TimeSeries | None = None):
    cols = {"t": series.times, "value": series.values}
    if exact is not None:
        cols["exact"] = exact.values
    return write_csv(path, cols, series.metadata)


def read_series(path) -> TimeSeries:
    meta, cols = read_csv(path)
    return TimeSeries(cols["t"], cols["value"], meta)


def peak_summary(results, cfg: RunConfig | None = None, tau: float | None = None) -> dict:
    peaks, failures = [], []
    for r in results:
        if r.peak is None:
            failures.append({"N": r.N, "error": r.error})
            continue
        entry = {"N": r.N, **r.peak.as_dict()}
        if cfg is not None:
            ref = reference_gap(cfg, r.N)
            if ref is not None:
                entry["reference_gap"] = ref
        peaks.append(entry)
    out = {"peaks": peaks, "failures": failures}
    if tau is not None:
        out["tau"] = tau
    return out


def scaling_from_summary(summary: dict) -> ScalingFit:
    pts = sorted((p for p in summary["peaks"] if p.get("N") is not None), key=lambda p: p["N"])
    sizes = [p["N"] for p in pts]
    omegas = [p["omega_m"] for p in pts]
    sigma = [p["uncertainty"] for p in pts] if pts and "uncertainty" in pts[0] else None
    return fit_exponent(sizes, omegas, sigma=sigma)


def write_scaling(directory: Path, fit: ScalingFit) -> list[Path]:
    files = [write_json(directory / "scaling.json", fit.as_dict())]
    files.append(
        write_csv(
            directory / "scaling_plot.csv",
            {"log_N": np.log(fit.sizes), "log_gap": np.log(fit.gaps), "log_fit": np.log(fit.predict(fit.sizes))},
            {"z": fit.z, "z_err": fit.z_err, "prefactor": fit.prefactor},
        )
    )
    return files


def run_pipeline(cfg: RunConfig, directory=None) -> dict:
    """Run every stage for every size, write all artifacts and return the manifest."""
    cfg = cfg.resolved()
    out = output_path(directory if directory is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    timings = {}

    t0 = time.perf_counter()
    results = run_sizes(cfg)
    timings["respond_and_spectrum"] = time.perf_counter() - t0

    files = []
    for r in results:
        files.append(write_series(out / f"series_N{r.N}.csv", r.series, r.exact))
        files.append(spectrum_to_csv(r.spectrum, out / f"spectrum_N{r.N}.csv"))
    summary = peak_summary(results, cfg, cfg.tau)
    files.append(write_json(out / "peaks.json", summary))

    t0 = time.perf_counter()
    fit = None
    fit_error = None
    good = [r for r in results if r.peak is not None]
    try:
        fit = fit_peaks([r.N for r in good], [r.peak.omega_m for r in good], cfg.tau)
        files.extend(write_scaling(out, fit))
    except (InvalidParamsError, NumericError) as exc:
        fit_error = str(exc)
    timings["scaling"] = time.perf_counter() - t0

    manifest = {
        "config": cfg.as_dict(),
        "version": __version__,
        "timings": {**timings, "per_size": {str(r.N): r.seconds for r in results}},
        "files": {f.name: sha256(f) for f in files},
        "z": None if fit is None else fit.z,
        "z_err": None if fit is None else fit.z_err,
        "scaling_error": fit_error,
    }
    write_json(out / "manifest.json", manifest)
    manifest["results"] = results
    manifest["fit"] = fit
    return manifest


def manifest_config(path) -> RunConfig:
    """Config recorded in a manifest, for re-running it."""
    d = read_json(path)["config"]
    d["sizes"] = tuple(d["sizes"])
    return RunConfig(**d)


_RNG_NAMES = ("default_rng", "seed", "random", "rand", "randn", "randint", "normal", "uniform", "choice", "shuffle", "permutation")


@contextlib.contextmanager
def forbid_rng():
    """Make every common random-number entry point raise for the duration of the block."""

    def trap(*_a, **_k):
        raise RuntimeError("a random number generator was consulted during a deterministic run")

    saved = []
    for mod, names in ((np.random, _RNG_NAMES), (random, ("random", "seed", "randint", "uniform", "choice", "shuffle", "gauss"))):
        for name in names:
            if hasattr(mod, name):
                saved.append((mod, name, getattr(mod, name)))
                setattr(mod, name, trap)
    try:
        yield
    finally:
        for mod, name, fn in saved:
            setattr(mod, name, fn)


__all__ = [
    "RunConfig",
    "load_config",
    "config_from_mapping",
    "run_pipeline",
    "respond",
    "extract_peak",
    "fit_peaks",
    "run_sizes",
    "forbid_rng",
]
