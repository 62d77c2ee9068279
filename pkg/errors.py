"""
Exception hierarchy for the dcmi estimator.

Input problems (bad files, bad flags) and computation problems (degenerate
samples, quadrature failures) are kept apart so the CLI can map them to
distinct exit codes.
"""

from typing import Any, Optional

from settings import EXIT_ESTIMATION_ERROR, EXIT_INPUT_ERROR


class DcmiError(Exception):
    """Base class for every error raised by this package."""

    exit_code: int = EXIT_ESTIMATION_ERROR


class InputError(DcmiError, ValueError):
    """Invalid input supplied by the caller."""

    exit_code: int = EXIT_INPUT_ERROR


class DatasetError(InputError):
    """Unreadable, malformed or empty labeled dataset."""


class ConfigError(InputError):
    """Invalid configuration: parameters, grids or settings."""


class EstimationError(DcmiError):
    """A computation could not be carried out on valid input."""


class InsufficientSampleError(EstimationError):
    """Fewer than two values where a bandwidth is needed."""

    def __init__(self, message: str, label: Optional[Any] = None) -> None:
        super().__init__(message)
        self.label = label


class ZeroVarianceError(EstimationError):
    """All values identical where a spread is needed."""

    def __init__(self, message: str, label: Optional[Any] = None) -> None:
        super().__init__(message)
        self.label = label


class QuadratureError(EstimationError):
    """Adaptive quadrature exhausted its budget before meeting tolerance."""


class ExperimentError(EstimationError):
    """An estimation failure inside a sweep, tagged with where it happened."""

    def __init__(self, cause: Exception, grid_value: float, replicate: int) -> None:
        super().__init__(f"grid value {grid_value:g}, replicate {replicate}: {cause}")
        self.cause = cause
        self.grid_value = grid_value
        self.replicate = replicate


class SurrogateError(EstimationError):
    """A surrogate dataset could not be estimated, tagged with its index."""

    def __init__(self, cause: Exception, surrogate: int) -> None:
        label = getattr(cause, 'label', None)
        if label is None:
            message = f"surrogate {surrogate}: {cause}"
        else:
            message = (f"surrogate {surrogate}: label {label} under-drawn "
                       f"by the null model ({cause})")
        super().__init__(message)
        self.cause = cause
        self.surrogate = surrogate
        self.label = label
