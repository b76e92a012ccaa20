"""Typed exceptions raised across the package.

Numeric routines never let NaN propagate silently; anything that cannot
produce a meaningful finite answer raises one of these.
"""


class CensMeanError(Exception):
    """Base class for all package errors."""


class DomainError(CensMeanError, ValueError):
    """An argument is outside the mathematical domain of a function."""


class DeepTailError(CensMeanError):
    """Censoring point sits so far in the tail that S(w) is numerically zero."""


class NonexistentMeanError(CensMeanError):
    """The requested conditional mean does not exist (diverging integral)."""


class EmptyIntervalError(CensMeanError):
    """An interval [l, u] carries no probability mass under the fitted model."""


class QuadratureError(CensMeanError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class FitError(CensMeanError):
    """Maximum-likelihood fitting cannot proceed or produced a degenerate model."""


class ImputationError(CensMeanError):
    """Imputation pipeline failure, annotated with the offending row/replicate."""


class DataError(CensMeanError):
    """Malformed input data (CSV parsing, column mapping, invalid values)."""
