"""
Contains a class to represent a histogram bin layout, parsed from the
compact string format accepted by the ``--bins`` flag and by every
binned estimator.
"""

import numpy as np

from .errors import SizeError, UsageError

DEFAULT_BINS = "32"
"""Default layout: 32 equal-width bins spanning mean +/- 4 sample standard deviations."""

DEFAULT_WIDTH = 4.0


class BinSpecError(UsageError):
    """
    This exception is raised when an invalid value is passed to
    :py:class:`BinSpec`. The message of this exception will contain a
    human readable explanation of the error.
    """
    pass


class BinSpec(object):
    """
    Encapsulates a bin layout. Examples of layouts:

      32      - 32 bins over mean +/- 4 sample standard deviations
      16:3    - 16 bins over mean +/- 3 sample standard deviations
      20@-1:1 - 20 bins over the fixed interval [-1, 1]

    """

    def __init__(self, value=DEFAULT_BINS):
        """
        Initializes a bin layout from a string in the following format:

        ::

          count[:width] | count@lower:upper

        Notes:

          - ``count`` must be a positive integer.
          - ``width`` is the half-width of the binned interval in units of
            the sample standard deviation, and defaults to 4.
          - ``@lower:upper`` fixes the interval instead; ``lower`` must be
            strictly less than ``upper``.
        """
        value = str(value).strip()
        if len(value) == 0:
            raise BinSpecError("Bin spec must not be empty")

        self.lower = None
        self.upper = None
        self.width = None

        if "@" in value:
            count_part, range_part = value.split("@", 1)
            parts = range_part.split(":")
            if len(parts) != 2:
                raise BinSpecError("explicit range must be lower:upper, not %s" % range_part)
            try:
                lower = float(parts[0])
                upper = float(parts[1])
            except ValueError:
                raise BinSpecError("invalid range: %s" % range_part)
            if not (np.isfinite(lower) and np.isfinite(upper)) or lower >= upper:
                raise BinSpecError("lower must be finite and less than upper")
            self.lower = lower
            self.upper = upper
        else:
            parts = value.split(":")
            if len(parts) > 2:
                raise BinSpecError("Bin spec cannot have more than two parts.")
            count_part = parts[0]
            width = parts[1] if len(parts) == 2 else DEFAULT_WIDTH
            try:
                width = float(width)
            except ValueError:
                raise BinSpecError("invalid width: %s" % parts[1])
            if not np.isfinite(width) or width <= 0:
                raise BinSpecError("width must be a positive number")
            self.width = width

        try:
            count = int(count_part)
        except ValueError:
            raise BinSpecError("invalid bin count: %s" % count_part)
        if count < 1:
            raise BinSpecError("bin count must be at least 1")
        self.count = count

    @property
    def explicit(self):
        """True when the layout fixes its interval instead of scaling to the data."""
        return self.lower is not None

    def edges(self, values, nonnegative=False):
        """
        Returns the ``count + 1`` strictly increasing bin edges for the
        sample ``values``. With ``nonnegative`` set, a data-scaled
        interval is clipped at 0, which suits squared quantities.

        A degenerate sample (zero spread) gets a unit-wide interval
        centred on its mean so that it still lands in a bin.
        """
        if self.explicit:
            return np.linspace(self.lower, self.upper, self.count + 1)

        values = np.asarray(values, dtype=float)
        if values.size == 0:
            raise SizeError("cannot lay out bins for an empty sample")

        center = float(np.mean(values))
        half = self.width * float(np.std(values))
        if not half > 0:
            half = 0.5
        lower = center - half
        upper = center + half
        if nonnegative and lower < 0.0:
            lower = 0.0
        return np.linspace(lower, upper, self.count + 1)

    def __str__(self):
        """
        Turns this layout back into its string form, which parses to an
        equivalent layout.

        Examples:

        ::

          >> str(BinSpec("32")) == "32"
          >> str(BinSpec("16:3")) == "16:3"
          >> str(BinSpec("20@-1:1")) == "20@-1:1"
        """
        if self.explicit:
            return "%d@%s:%s" % (self.count, _compact(self.lower), _compact(self.upper))
        if self.width == DEFAULT_WIDTH:
            return "%d" % self.count
        return "%d:%s" % (self.count, _compact(self.width))


def _compact(value):
    return str(int(value)) if float(value).is_integer() else repr(float(value))
