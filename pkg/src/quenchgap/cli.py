"""Command line: ``quenchgap respond | spectrum | scaling | pipeline``.

Exit codes: 0 success, 1 invalid input or configuration, 2 numeric failure.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .errors import InvalidParamsError, NoPeakFoundError, NumericError
from .io import read_json, write_json
from .pipeline import (
    MODELS,
    RunConfig,
    forbid_rng,
    load_config,
    output_path,
    parse_sizes,
    read_series,
    run_pipeline,
    run_sizes,
    scaling_from_summary,
    write_scaling,
    write_series,
)
from .spectral import WINDOWS, compute_spectrum, lowest_peak, spectrum_to_csv

log = logging.getLogger("quenchgap")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _run_options(p):
    p.add_argument("--config", type=Path, help="INI run configuration")
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--sizes", help="comma separated system sizes")
    p.add_argument("--amplitude", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--n-tau", type=int, dest="n_tau")
    p.add_argument("--temperature", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--with-oracle", action="store_true", help="add the exact-dynamics column")
    p.add_argument("--out", help="output directory (relative paths go under $QUENCHGAP_OUTPUT_ROOT)")


def _spectral_options(p):
    p.add_argument("--window", choices=WINDOWS)
    p.add_argument("--noise-floor", type=float, dest="noise_floor")
    p.add_argument("--min-amplitude", type=float, dest="min_amplitude")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quenchgap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seedless", action="store_true", help="fail if any random number generator is consulted")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("respond", help="write one response trace per size")
    _run_options(p)

    p = sub.add_parser("spectrum", help="spectra and lowest peaks of trace files")
    p.add_argument("series", nargs="+", type=Path)
    _spectral_options(p)
    p.add_argument("--out", default=".")

    p = sub.add_parser("scaling", help="fit the gap exponent from a peak summary")
    p.add_argument("peaks", type=Path)
    p.add_argument("--out", default=".")

    p = sub.add_parser("pipeline", help="all stages, all sizes, with a manifest")
    _run_options(p)
    _spectral_options(p)
    return parser


def config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    over = {}
    if args.model:
        over["model"] = args.model
        if args.config is None or args.model != cfg.model:
            over["params"] = {}
    if args.sizes:
        over["sizes"] = parse_sizes(args.sizes, "--sizes")
    for key in ("amplitude", "tau", "n_tau", "temperature", "workers", "window", "noise_floor", "min_amplitude"):
        value = getattr(args, key, None)
        if value is not None:
            over[key] = value
    if args.with_oracle:
        over["with_oracle"] = True
    if args.out:
        over["output_dir"] = args.out
    return replace(cfg, **over).resolved()


def cmd_respond(args) -> int:
    cfg = config_from_args(args)
    out = output_path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for r in run_sizes(cfg):
        path = write_series(out / f"series_N{r.N}.csv", r.series, r.exact)
        log.info("wrote %s", path)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    out = output_path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    window = args.window or "none"
    floor = 0.05 if args.noise_floor is None else args.noise_floor
    min_amp = args.min_amplitude or 0.0
    peaks, failures = [], []
    tau = None
    for path in args.series:
        series = read_series(path)
        n = series.metadata.get("N")
        spec = compute_spectrum(series, window=window)
        spectrum_to_csv(spec, out / f"spectrum_{path.stem}.csv")
        tau = series.duration
        try:
            peak = lowest_peak(spec, floor, min_amp)
        except NoPeakFoundError as exc:
            failures.append({"N": n, "file": str(path), "error": str(exc)})
            continue
        peaks.append({"N": n, "file": str(path), **peak.as_dict()})
    write_json(out / "peaks.json", {"peaks": peaks, "failures": failures, "tau": tau})
    return EXIT_OK


def cmd_scaling(args) -> int:
    out = output_path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fit = scaling_from_summary(read_json(args.peaks))
    write_scaling(out, fit)
    print(f"z = {fit.z:.4f} +/- {fit.z_err:.4f}")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    cfg = config_from_args(args)
    manifest = run_pipeline(cfg)
    for r in manifest["results"]:
        msg = f"N={r.N}: omega_m={r.peak.omega_m:.6f}" if r.peak else f"N={r.N}: no peak ({r.error})"
        print(msg)
    if manifest["fit"] is None:
        print(f"scaling failed: {manifest['scaling_error']}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"z = {manifest['z']:.4f} +/- {manifest['z_err']:.4f}")
    return EXIT_OK


_COMMANDS = {"respond": cmd_respond, "spectrum": cmd_spectrum, "scaling": cmd_scaling, "pipeline": cmd_pipeline}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    guard = forbid_rng() if args.seedless else contextlib.nullcontext()
    try:
        with guard:
            return _COMMANDS[args.command](args)
    except InvalidParamsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
