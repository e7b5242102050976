"""Exception hierarchy shared by the library and the command line."""


class SGError(Exception):
    """Base class for all errors raised by sgwindow."""


class DomainError(SGError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class IllPosedContextError(DomainError):
    """The window is too short for the requested polynomial order."""


class UndefinedMinimumError(DomainError):
    """The cost model has no finite minimizer (zero roughness)."""


class LengthError(SGError, ValueError):
    """A signal is too short, or two signals have mismatched lengths."""


class NumericError(SGError, ArithmeticError):
    """A numerical routine failed where it was expected to succeed."""


class ParseError(SGError, ValueError):
    """Input data could not be parsed."""
