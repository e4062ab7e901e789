"""Exception hierarchy shared by all modules."""


class SeqOptError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(SeqOptError, ValueError):
    """An argument or experiment descriptor is out of its valid range."""


class InvariantError(SeqOptError, ValueError):
    """A value violates a structural invariant (unitarity, unit norm, ...)."""


class ShapeError(SeqOptError, ValueError):
    """Operands have incompatible qubit counts."""


class CapabilityError(SeqOptError):
    """The request exceeds what the implementation supports (e.g. dense size)."""


class RepresentationError(SeqOptError, TypeError):
    """A circuit slot holds the wrong gate parameterization for an operation."""


class BudgetExhausted(SeqOptError):
    """Not enough circuit evaluations remain for the requested step."""


class ParseError(SeqOptError, ValueError):
    """A trace file is malformed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
