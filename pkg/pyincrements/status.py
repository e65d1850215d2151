"""
This module provides the Status class, which encapsulates the outcome
of a command-line run together with its process exit code, and the
mapping from library exceptions onto those statuses.
"""

from functools import total_ordering

from .errors import (DataError, NumericalError, ParameterError,
                     UsageError)


@total_ordering
class Status(object):
    """
    Encapsulates a run status: a short name, the exit code handed back
    to the shell, and a one-line description listed in ``--help``.
    Statuses order by exit code.
    """

    def __init__(self, name, exit_code, description=""):
        """
        Creates a new status.

        **Note**: In general, this should never be called since the standard
        statuses are exported from ``pyincrements``.
        """
        if not isinstance(exit_code, int):
            raise ValueError("exit_code must be an int, not %s" % type(exit_code))
        if not isinstance(name, str):
            raise ValueError("name must be a str, not %s" % type(name))

        self.name = name
        self.exit_code = exit_code
        self.description = description

    def __repr__(self):
        return "Status(name=%r, exit_code=%d)" % (self.name, self.exit_code)

    def __hash__(self):
        return hash(self.exit_code)

    def __eq__(self, other):
        return self.exit_code == other.exit_code

    def __lt__(self, other):
        return self.exit_code < other.exit_code


SUCCESS = Status("OK", 0, "success")
USAGE_ERROR = Status("USAGE", 1, "invalid flags or parameters")
DATA_ERROR = Status("DATA", 2, "input data rejected")
NUMERICAL_ERROR = Status("NUMERICAL", 3, "numerical or optimization failure")

STATUSES = (SUCCESS, USAGE_ERROR, DATA_ERROR, NUMERICAL_ERROR)


def status_for_exception(exc):
    """
    Returns the :py:class:`Status` a command should exit with after
    ``exc`` escaped it. Parameter invariant violations count as usage
    errors because they are caught before any work starts. Anything
    unrecognised is re-raised by the caller, so this returns ``None``.
    """
    # ParameterError is a DataError too; it must be tested first
    if isinstance(exc, (UsageError, ParameterError)):
        return USAGE_ERROR
    if isinstance(exc, DataError):
        return DATA_ERROR
    if isinstance(exc, NumericalError):
        return NUMERICAL_ERROR
    return None
