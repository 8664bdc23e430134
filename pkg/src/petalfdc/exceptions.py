"""Exception hierarchy.

Validation problems derive from ``SpecError`` (a ``ValueError``); numerical
failures derive from ``NumericError``. The CLI maps the two families onto
distinct exit codes.
"""


class SpecError(ValueError):
    """A petal specification, graph or weight assignment is invalid."""


class NotClassConstant(SpecError):
    """Weights differ between edges of the same edge class."""


class NumericError(ArithmeticError):
    """Base class for numerical failures."""


class NotSymmetric(NumericError, ValueError):
    pass


class MultipleUnitEigenvalues(NumericError):
    """Eigenvalue one is not simple: the iteration does not reach consensus."""


class NoSuchEigenvalue(NumericError):
    """A candidate SLEM is missing from one of the quotient spectra."""


class DegenerateEquation(NumericError):
    """A characteristic equation vanishes identically on the scan grid."""


class Underflow(NumericError):
    """A trajectory reached the numerical floor before the requested window."""
