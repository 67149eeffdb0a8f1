"""Exception and warning types.

Errors split into two families so the command line can map them onto exit
codes: ``InvalidParamsError`` (bad input, exit 1) and ``NumericError``
(a computation that could not deliver its guarantee, exit 2).
"""


class QuenchGapError(Exception):
    """Base class for all package errors."""


class InvalidParamsError(QuenchGapError, ValueError):
    """Parameters violate a documented precondition."""


class ConfigError(InvalidParamsError):
    """A run configuration is malformed; the message names the offending key."""


class SizeLimitError(InvalidParamsError):
    """Requested Hilbert space is above the dense-diagonalization cap."""


class NormalizationError(InvalidParamsError):
    """A state vector is not normalized."""


class GridMismatchError(InvalidParamsError):
    """Time grids of combined trajectories differ."""


class TooFewSamplesError(InvalidParamsError):
    pass


class UnevenGridError(InvalidParamsError):
    pass


class InsufficientPointsError(InvalidParamsError):
    pass


class NonPositiveGapError(InvalidParamsError):
    pass


class NumericError(QuenchGapError, ArithmeticError):
    """A numerical routine failed to meet its accuracy contract."""


class DegenerateModeError(NumericError):
    """A two-level mode has zero splitting, so the response is undefined."""


class QuadratureError(NumericError):
    pass


class StepSizeError(NumericError):
    pass


class NoPeakFoundError(NumericError):
    """Nothing in the spectrum rises above the detection threshold."""


class NoBracketError(NumericError):
    """The gap is monotone on the scan interval, so there is no interior minimum."""


class DegeneracyWarning(UserWarning):
    pass


class ConditioningWarning(UserWarning):
    pass


class AmplitudeWarning(UserWarning):
    pass
