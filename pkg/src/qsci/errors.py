"""Exception hierarchy shared across the package."""


class QsciError(Exception):
    """Base class for package errors."""


class BitstringFormatError(QsciError, ValueError):
    """A measured bitstring does not match the expected 2M-character format."""


class InvalidExcitationError(QsciError, ValueError):
    """Hole/particle lists conflict with the occupations of a determinant."""


class FcidumpParseError(QsciError, ValueError):
    """Malformed FCIDUMP content; carries the offending line number."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class DimensionError(QsciError, ValueError):
    """Inputs with incompatible or degenerate dimensions."""


class CapabilityError(QsciError):
    """The request exceeds documented desk-scale limits (qubit cap, sector size)."""


class ConvergenceError(QsciError):
    """An iterative solver failed to converge; carries the best iterate."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class CheckpointError(QsciError):
    """Unreadable, corrupt, or version-incompatible checkpoint data."""
