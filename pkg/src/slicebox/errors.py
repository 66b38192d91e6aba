"""Exception hierarchy shared by the library and the CLI."""


class SliceboxError(Exception):
    """Base class for every error raised by slicebox."""


class DomainError(SliceboxError, ValueError):
    """A value lies outside the domain of a map or a density's support."""


class ArgumentError(SliceboxError, ValueError):
    """Invalid arguments to a library call."""


class LookupFailure(SliceboxError, KeyError):
    """Unknown registry name (builtin target, scenario)."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class StateError(SliceboxError, RuntimeError):
    """The chain state cannot be advanced (e.g. zero density at x)."""


class EvaluationError(SliceboxError, ArithmeticError):
    """Evaluating a density produced NaN or another undefined value."""


class IntegrationError(SliceboxError, ArithmeticError):
    """Quadrature of a reference density failed."""


class ParseError(SliceboxError, ValueError):
    """Syntax error in a density expression.

    ``position`` is the 0-based character offset where parsing failed.
    """

    def __init__(self, message, position, text=""):
        super().__init__(f"{message} at offset {position}")
        self.message = message
        self.position = position
        self.text = text


class UnknownIdentifierError(ParseError):
    pass


class ArityError(ParseError):
    pass
