"""
Error types
Exception hierarchy shared by the distributions, spectra, quadrature and engine modules
"""
from typing import Optional


class SRMError(Exception):
    """Base class for every error raised by this package"""


class DomainError(SRMError, ValueError):
    """An argument lies outside the mathematical domain of the operation"""


class UnsupportedOperationError(SRMError):
    """The operation is not defined for this distribution or spectrum kind"""


class ConfigurationError(SRMError, ValueError):
    """A quadrature scheme or run configuration is inconsistent"""


class InputValidationError(SRMError, ValueError):
    """User-supplied data failed validation

    Carries the offending config key or input line number when known, so
    the CLI can name it in its message.
    """

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        super().__init__(message)
        self.key = key
        self.line = line
