"""Exception types shared across the package."""


class ClsmError(Exception):
    """Base class for all errors raised by this package."""


class OutOfRange(ClsmError):
    """A pitch or value falls outside the supported range."""


class InvalidSpan(ClsmError):
    """A target span is inconsistent with the sequence it indexes."""


class InvalidInput(ClsmError):
    """An input has the wrong shape or content."""


class InvalidConfig(ClsmError):
    """A configuration value violates its constraints."""


class InvalidToken(ClsmError):
    """A token is not part of the expected vocabulary."""


class InsufficientData(ClsmError):
    """Not enough data to perform the requested operation."""


class NumericalError(ClsmError):
    """A numeric computation produced non-finite values."""


class EmptyEvaluation(ClsmError):
    """An evaluation excluded every candidate and has nothing to report."""


class CheckpointError(ClsmError):
    """A checkpoint cannot be loaded (version, kind, or shape mismatch)."""
