"""
Exception classes raised throughout pyincrements. Every class also
derives from the builtin it specialises, so callers may catch either
``ValueError``/``ArithmeticError`` or the more specific class.

The command line maps these onto exit statuses; see
:py:mod:`pyincrements.cli`.
"""


class PyIncrementsError(Exception):
    """Base class of every error raised by this package."""
    pass


class UsageError(PyIncrementsError, ValueError):
    """
    Raised when the library is called in a way that can never work,
    such as an unknown model tag or an invalid option value.
    """
    pass


class DataError(PyIncrementsError, ValueError):
    """Base class for problems with the data handed to an operation."""
    pass


class SizeError(DataError):
    """
    Raised when a length, lag, index or window is out of range for the
    series or ensemble it is applied to.
    """
    pass


class DomainError(DataError):
    """
    Raised when a value lies outside the mathematical domain of an
    operation, e.g. a non-positive price or a negative conditional mean
    square fluctuation.
    """
    pass


class ParameterError(DomainError):
    """
    Raised when a model parameter record violates its invariants. The
    offending field is available as ``field`` and is named in the
    message.
    """

    def __init__(self, field, message):
        super(ParameterError, self).__init__("%s: %s" % (field, message))
        self.field = field


class FormatError(DataError):
    """
    Raised for malformed input: unparsable rows, unknown headers and
    timestamps that are not on the sampling grid.
    """
    pass


class NumericalError(PyIncrementsError, ArithmeticError):
    """Base class for numerical failures."""
    pass


class SingularityError(NumericalError):
    """Raised when a regression has a degenerate regressor."""
    pass


class ResourceError(NumericalError):
    """Raised when a request would exceed a configured resource limit."""
    pass


class OptimizationError(NumericalError):
    """
    Raised when every optimizer start fails. The best parameters seen
    so far are attached as ``best_params`` (possibly ``None``).
    """

    def __init__(self, message, best_params=None):
        super(OptimizationError, self).__init__(message)
        self.best_params = best_params
