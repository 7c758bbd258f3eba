"""Exception hierarchy shared across the package."""


class ResSpecError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(ResSpecError, ValueError):
    """An argument is outside its documented domain."""


class SingularSpectrumError(ResSpecError, ArithmeticError):
    """A spectral matrix (or sub-block) is singular or too ill-conditioned.

    Attributes
    ----------
    frequency : float or None
        Grid frequency at which the failure was detected, when known.
    """

    def __init__(self, message, frequency=None):
        super().__init__(message)
        self.frequency = frequency


class NumericalConsistencyError(ResSpecError, ArithmeticError):
    """An analytically real or positive quantity failed its numerical check."""


class ParseError(ResSpecError, ValueError):
    """Malformed input file.

    Attributes
    ----------
    row, column : int or None
        1-based location of the offending cell, when known.
    """

    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column
