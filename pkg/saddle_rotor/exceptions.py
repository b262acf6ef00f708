"""Exceptions raised by saddle_rotor."""
from .const import EXIT_INVARIANT, EXIT_NUMERICAL, EXIT_PARSE


class SaddleRotorError(Exception):
    """Base error; carries the CLI exit code."""

    exit_code = EXIT_NUMERICAL


class DimensionError(SaddleRotorError):
    """Block shapes do not fit together."""

    exit_code = EXIT_PARSE


class SymmetryError(SaddleRotorError):
    """Matrix expected symmetric is not."""

    exit_code = EXIT_PARSE


class IndefiniteError(SaddleRotorError):
    """Matrix expected positive semi-definite is not."""

    exit_code = EXIT_PARSE


class SingularityError(SaddleRotorError):
    """Matrix to be inverted is (numerically) singular."""


class ClassificationError(SaddleRotorError):
    """Eigenvalue falls in the band where its sign cannot be trusted."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class GraphSubspaceError(SaddleRotorError):
    """Subspace is not a graph over H+."""


class FitError(SaddleRotorError):
    """Power-law fit has nothing to work with."""


class ConsistencyError(SaddleRotorError):
    """Two constructions of the same object disagree."""

    exit_code = EXIT_INVARIANT


class InvariantViolation(SaddleRotorError):
    """A checked theorem-level property failed."""

    exit_code = EXIT_INVARIANT

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ProblemFileError(SaddleRotorError):
    """Problem file cannot be read or validated."""

    exit_code = EXIT_PARSE

    def __init__(self, message, block=None):
        super().__init__(message)
        self.block = block
