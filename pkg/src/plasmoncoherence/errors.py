"""Exceptions raised by the package, and the exit codes the CLI maps them to."""

from __future__ import annotations

from enum import IntEnum


class ExitCode(IntEnum):
    """Process exit codes of the command line tool."""

    SUCCESS = 0
    CONFIG_ERROR = 2
    DATA_ERROR = 3
    NUMERICAL_ERROR = 4

    @staticmethod
    def get_exit_code_name(exit_code: int | ExitCode) -> str:
        """Return a human-readable name for the given exit code."""
        try:
            return ExitCode(exit_code).name
        except ValueError:
            return f"Unknown exit code: {exit_code}"


class PlasmonCoherenceError(Exception):
    """Base class for exceptions in this package."""

    exit_code: ExitCode = ExitCode.NUMERICAL_ERROR


class ConfigError(PlasmonCoherenceError):
    """The experiment configuration is malformed or inconsistent."""

    exit_code = ExitCode.CONFIG_ERROR

    def __init__(self, message: str, line: int | None = None) -> None:
        """Remember the 1-based line of the offending key, when known."""
        super().__init__(message)
        self.line = line


class ChannelError(PlasmonCoherenceError, ValueError):
    """A physical parameter is outside its allowed range."""

    exit_code = ExitCode.CONFIG_ERROR


class DataError(PlasmonCoherenceError):
    """Input data cannot support the requested computation."""

    exit_code = ExitCode.DATA_ERROR


class SchemaError(DataError):
    """A CSV file does not match its expected schema."""


class InsufficientDataError(DataError):
    """Too few distinct settings for a fit or a correlation."""


class UndefinedCorrelationError(DataError):
    """A correlation value has no counts to be computed from."""


class MaterialRangeError(DataError):
    """A wavelength falls outside the tabulated optical constants."""

    def __init__(self, message: str, wavelength: float) -> None:
        """Keep the offending wavelength for the caller."""
        super().__init__(message)
        self.wavelength = wavelength


class NumericalError(PlasmonCoherenceError):
    """A numerical procedure could not produce a valid result."""

    exit_code = ExitCode.NUMERICAL_ERROR


class DegenerateInputError(NumericalError):
    """A least-squares design matrix is rank deficient."""


class InvalidFitError(NumericalError):
    """A fringe fit has no positive offset, so no visibility exists."""


class FitError(NumericalError):
    """A nonlinear fit found no peak or did not converge."""


class StencilError(NumericalError):
    """Re k is not monotonic over a finite-difference stencil."""


class ResonanceSingularityError(NumericalError):
    """eps_m + eps_d vanishes: the SPP wavevector is singular."""


class LosslessModeError(NumericalError):
    """A mode without loss has no finite propagation length."""


class NoBoundError(NumericalError):
    """The visibility is too low for a dephasing-time bound."""
