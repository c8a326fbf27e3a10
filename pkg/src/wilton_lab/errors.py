"""Exception types shared across the package."""


class WiltonLabError(Exception):
    """Base class for all package errors."""


class ParseError(WiltonLabError, ValueError):
    """Malformed textual input (RealSpec strings, K lists, ...)."""


class DomainError(WiltonLabError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class CFTerminated(DomainError):
    """The continued fraction ended before the requested depth.

    ``partial`` carries whatever the caller may still want (usually the
    truncated orbit or partial sum).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class CalibrationError(WiltonLabError):
    """A moment-engine calibration pre-flight missed its tolerance."""
