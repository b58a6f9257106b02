"""Exception types shared across the package."""


class ScsaError(Exception):
    """Base class for every error raised by this package."""


class DataError(ScsaError, ValueError):
    """Invalid input data or parameters: domain violations, dimension mismatches."""


class FormatError(DataError):
    """Unsupported or malformed image file."""


class NumericalError(ScsaError, RuntimeError):
    """Numerical failure, e.g. an eigensolver that did not converge."""
