"""Exception hierarchy shared by the library and the command line."""

from typing import Optional


class PreprocessError(Exception):
    """Base class for every error raised by the preprocessor package."""


class PolynomialSyntaxError(PreprocessError, ValueError):
    """Raised when an expression string cannot be parsed as a polynomial."""

    def __init__(self, message: str, text: str = "", position: Optional[int] = None):
        self.message = message
        self.text = text
        self.position = position
        super().__init__(self._render())

    def _render(self) -> str:
        if self.position is None:
            return self.message
        line = self.text.replace("\n", " ")
        caret = " " * self.position + "^"
        return f"{self.message} at position {self.position}\n  {line}\n  {caret}"


class ZeroPolynomialError(PreprocessError, ValueError):
    """Raised when a polynomial has no term above the drop tolerance."""


class DomainError(PreprocessError, ZeroDivisionError):
    """Raised on a zero base with a negative exponent or a zero torus point."""


class NotPrimitiveError(PreprocessError, ValueError):
    """Raised when a direction is not a primitive integer vector."""


class ExponentOverflowError(PreprocessError, OverflowError):
    """Raised when a transformed exponent leaves the signed 64-bit range."""


class DegenerateFormError(PreprocessError, ValueError):
    """Raised when an operation needs a nonconstant polynomial and gets none."""


class ConfigError(PreprocessError, ValueError):
    """Raised on invalid configuration values."""
