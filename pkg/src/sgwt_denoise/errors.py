"""Exception hierarchy shared by all modules.

Each category maps to one CLI exit code (see :mod:`sgwt_denoise.cli`).
"""


class SGWTError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SGWTError, ValueError):
    """Input violates a structural invariant (shape, symmetry, sign...)."""


class ParameterError(ValidationError):
    """A scalar parameter is out of its allowed range."""


class FormatError(SGWTError):
    """A file or payload could not be parsed.

    Attributes:
        line: 1-based line number of the offending line, when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TransportError(SGWTError):
    """Network fetch failed.

    Attributes:
        status: HTTP status code, or None for connection-level failures.
    """

    def __init__(self, message: str, status: int | None = None, url: str | None = None):
        self.status = status
        self.url = url
        super().__init__(message)
