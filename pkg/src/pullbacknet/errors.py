"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


class ShapeError(InvalidInputError):
    """Operands have incompatible dimensions."""


class DomainError(InvalidInputError):
    """A value lies outside the mathematical domain of an operation."""


class NumericError(ArithmeticError):
    """A numerical routine failed or produced non-finite results."""


class ParseError(ValueError):
    """A data file could not be parsed.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line
