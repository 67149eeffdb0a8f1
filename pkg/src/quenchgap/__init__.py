"""Finite-size gaps and critical exponents from the linear response of quantum chains to small quenches."""

__version__ = "0.1.0"

from .errors import InvalidParamsError, NumericError, QuenchGapError  # noqa: E402
from .lrk import LrkParams, lrk_gap, lrk_modes  # noqa: E402
from .response import QuenchProtocol, TimeSeries, mx_response, nf_response, time_grid  # noqa: E402
from .scaling import fit_exponent, scan_gap_minimum  # noqa: E402
from .spectral import compute_spectrum, lowest_peak  # noqa: E402
from .tfim import TfimParams, tfim_gap, tfim_modes  # noqa: E402

__all__ = [
    "__version__",
    "QuenchGapError",
    "InvalidParamsError",
    "NumericError",
    "TfimParams",
    "tfim_modes",
    "tfim_gap",
    "LrkParams",
    "lrk_modes",
    "lrk_gap",
    "QuenchProtocol",
    "TimeSeries",
    "time_grid",
    "mx_response",
    "nf_response",
    "compute_spectrum",
    "lowest_peak",
    "fit_exponent",
    "scan_gap_minimum",
]
