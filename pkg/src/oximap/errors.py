"""Exception hierarchy shared by all oximap modules.

The CLI maps these onto exit codes: ArgumentError -> 2, DataError -> 3,
NumericalError -> 4. Library code raises the most specific class available.
"""


class OximapError(Exception):
    """Base class for all errors raised by this package."""


class ArgumentError(OximapError, ValueError):
    """A parameter is outside its documented domain (bad rect, levels, band...)."""


class DataError(OximapError):
    """Input data is malformed or inconsistent (file formats, grid mismatches,
    coverage gaps, mid-stream dimension changes, pyramid structure errors)."""


class NumericalError(OximapError):
    """A numerical operation cannot proceed."""


class SingularOperatorError(NumericalError):
    """A matrix that must be full rank is rank deficient."""


class IllConditionedPriorError(NumericalError):
    """The shape-prior normal matrix is numerically singular."""
