"""Exception hierarchy.

``InputError`` subclasses cover malformed or mismatched data (CLI exit
code 2); ``DomainError`` covers numerically invalid parameters such as a
non-positive entropy order (CLI exit code 3).
"""


class EntrokitError(Exception):
    """Base class for all errors raised by this package."""


class InputError(EntrokitError):
    """Malformed, inconsistent, or unusable input data."""


class IndexOutOfAlphabet(InputError):
    """A symbol index falls outside the declared alphabet [0, s)."""


class ParseError(InputError):
    """A text input does not match its expected format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateSymbol(InputError):
    """The same symbol (or symbol pair) appears twice in a counts file."""


class NegativeCount(InputError):
    """A count entry is negative."""


class EmptyHistogram(InputError):
    """An operation requires at least one observation (n >= 1)."""


class EmptyJoint(InputError):
    """A joint count table has total mass zero."""


class AlphabetMismatch(InputError):
    """Two objects that must share an alphabet size do not."""


class StreamTooShort(InputError):
    """A symbol stream is shorter than the requested block length."""


class AlphabetTooLarge(InputError):
    """The derived block alphabet exceeds the supported size."""


class DomainError(EntrokitError):
    """A numeric parameter lies outside its mathematical domain."""
