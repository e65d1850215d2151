"""
Series types and the elementary transformations between them: prices
to log-return levels, detrending, increments at a lag, and splitting
one long series into an ensemble of rebased paths.

Lags are always integer multiples of the sampling step. Real times are
carried as metadata only.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, FormatError, SizeError, UsageError

log = logging.getLogger(__name__)

TIMESTAMP_TOLERANCE = 0.1
"""Largest allowed deviation of a timestamp from the nominal grid, as a fraction of the step."""

DETRENDING_METHOD = "endpoint-line"


def _frozen_array(values, name):
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise FormatError("%s must be one-dimensional" % name)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Provenance(object):
    """Where an ingested series came from."""
    path: str
    digest: str
    rows: int


@dataclass(frozen=True, eq=False)
class PriceSeries(object):
    """
    Strictly positive prices on strictly increasing timestamps. When
    ``step`` is not given it is taken as the mean spacing.
    """
    timestamps: np.ndarray
    prices: np.ndarray
    step: Optional[float] = None
    provenance: Optional[Provenance] = None

    def __post_init__(self):
        timestamps = _frozen_array(self.timestamps, "timestamps")
        prices = _frozen_array(self.prices, "prices")
        if len(timestamps) != len(prices):
            raise FormatError("timestamps and prices differ in length")
        if len(prices) < 2:
            raise SizeError("a price series needs at least 2 samples, got %d" % len(prices))

        steps = np.diff(timestamps)
        if not np.all(steps > 0):
            index = int(np.argmax(~(steps > 0))) + 1
            raise FormatError("timestamps must be strictly increasing (index %d)" % index)
        if not np.all(prices > 0):
            index = int(np.argmax(~(prices > 0)))
            raise DomainError("price at index %d is not positive: %r" % (index, prices[index]))

        step = self.step
        if step is None:
            step = float(timestamps[-1] - timestamps[0]) / (len(timestamps) - 1)
        if not step > 0:
            raise FormatError("step must be positive")

        object.__setattr__(self, "timestamps", timestamps)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "step", float(step))

    def __len__(self):
        return len(self.prices)


@dataclass(frozen=True, eq=False)
class LevelSeries(object):
    """
    An evenly sampled path of levels ``x(k)`` at times
    ``origin_time + k * step``.
    """
    values: np.ndarray
    step: float = 1.0
    origin_time: float = 0.0
    detrended: bool = False
    provenance: Optional[Provenance] = None

    def __post_init__(self):
        values = _frozen_array(self.values, "values")
        if len(values) < 2:
            raise SizeError("a level series needs at least 2 samples, got %d" % len(values))
        if not np.all(np.isfinite(values)):
            raise FormatError("level values must be finite")
        if not (np.isfinite(self.step) and self.step > 0):
            raise FormatError("step must be positive, got %r" % self.step)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "step", float(self.step))
        object.__setattr__(self, "origin_time", float(self.origin_time))

    def __len__(self):
        return len(self.values)

    @property
    def times(self):
        return self.origin_time + self.step * np.arange(len(self.values))

    def replace(self, values, **changes):
        """Returns a copy carrying ``values`` and any other changed fields."""
        fields = dict(step=self.step, origin_time=self.origin_time,
                      detrended=self.detrended, provenance=self.provenance)
        fields.update(changes)
        return LevelSeries(values, **fields)


@dataclass(frozen=True, eq=False)
class IncrementSeries(object):
    """
    Differences ``z(t) = x(t) - x(t - T)`` at a fixed lag ``T``, indexed
    by the end index ``t`` of each difference.
    """
    lag_steps: int
    start_indices: np.ndarray
    values: np.ndarray
    overlapping: bool = False

    def __post_init__(self):
        starts = np.array(self.start_indices, dtype=np.int64)
        starts.setflags(write=False)
        values = _frozen_array(self.values, "values")
        if self.lag_steps < 1:
            raise SizeError("lag_steps must be a positive integer")
        if len(starts) != len(values):
            raise FormatError("start_indices and values differ in length")
        if len(starts) and starts.min() < self.lag_steps:
            raise SizeError("every start index must be >= lag_steps")
        if not self.overlapping and len(starts) > 1 and np.diff(starts).min() < self.lag_steps:
            raise FormatError("non-overlapping increments must be at least lag_steps apart")
        object.__setattr__(self, "start_indices", starts)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class Ensemble(object):
    """
    ``member_count`` equal-length level paths used for cross-path
    averages. Paths are stored row-wise in ``paths``; each starts at 0.

    ``discarded`` counts the tail samples an :py:func:`ensemble_split`
    dropped, and ``origin`` records whether the members were generated
    independently or split from one series.
    """
    paths: np.ndarray
    step: float = 1.0
    discarded: int = 0
    origin: str = "generated"

    def __post_init__(self):
        paths = np.array(self.paths, dtype=float)
        if paths.ndim != 2:
            raise FormatError("ensemble paths must be a 2-D array (members x length)")
        if paths.shape[0] < 1:
            raise SizeError("an ensemble needs at least one member")
        if paths.shape[1] < 2:
            raise SizeError("ensemble members need at least 2 samples")
        if not np.all(paths[:, 0] == 0.0):
            raise FormatError("every ensemble member must start at 0")
        paths.setflags(write=False)
        object.__setattr__(self, "paths", paths)
        object.__setattr__(self, "step", float(self.step))

    @classmethod
    def from_members(cls, members, origin="generated"):
        """Builds an ensemble from level series sharing length and step."""
        members = list(members)
        if not members:
            raise SizeError("an ensemble needs at least one member")
        step = members[0].step
        length = len(members[0])
        for member in members:
            if len(member) != length or member.step != step:
                raise SizeError("ensemble members must share length and step")
        return cls(np.vstack([m.values for m in members]), step=step, origin=origin)

    @property
    def member_count(self):
        return self.paths.shape[0]

    @property
    def length(self):
        return self.paths.shape[1]

    @property
    def members(self):
        return tuple(LevelSeries(row, step=self.step) for row in self.paths)

    def column(self, t):
        """Returns ``x(t)`` across all members."""
        if not 0 <= t < self.length:
            raise SizeError("index %d outside member length %d" % (t, self.length))
        return self.paths[:, t]


def check_grid(timestamps, step, tolerance=TIMESTAMP_TOLERANCE):
    """
    Raises :py:class:`FormatError` if any timestamp deviates from the
    nominal grid ``t0 + k * step`` by more than ``tolerance * step``.
    Irregular data is rejected rather than resampled.
    """
    timestamps = np.asarray(timestamps, dtype=float)
    grid = timestamps[0] + step * np.arange(len(timestamps))
    off = np.abs(timestamps - grid) > tolerance * step
    if np.any(off):
        index = int(np.argmax(off))
        raise FormatError("timestamp at index %d is %r, off the grid of step %r by more than %g%%"
                          % (index, timestamps[index], step, 100 * tolerance))


def log_returns(prices, reference="first", tolerance=TIMESTAMP_TOLERANCE):
    """
    Converts prices into log-return levels
    ``x(k) = ln(p(k)/p_c) - ln(p(0)/p_c)``, so that ``x(0) = 0``.

    :Parameters:
      - `prices`: a :py:class:`PriceSeries`.
      - `reference` (optional): ``"first"`` to use the first price as
        ``p_c``, or an explicit positive price.
      - `tolerance` (optional): allowed timestamp deviation from the
        grid, as a fraction of the step.
    """
    if reference == "first":
        p_c = float(prices.prices[0])
    else:
        try:
            p_c = float(reference)
        except (TypeError, ValueError):
            raise UsageError("reference must be 'first' or a positive number, not %r"
                             % (reference,))
        if not p_c > 0:
            raise DomainError("reference price must be positive, got %r" % p_c)

    check_grid(prices.timestamps, prices.step, tolerance)

    logs = np.log(prices.prices / p_c)
    values = logs - logs[0]
    return LevelSeries(values, step=prices.step, origin_time=prices.timestamps[0],
                       detrended=False, provenance=prices.provenance)


def rebase(levels):
    """Shifts a level series so that it starts at 0."""
    return levels.replace(levels.values - levels.values[0])


def detrend(levels):
    """
    Removes the straight line through the endpoints: subtracts
    ``k * mu`` with ``mu = (x[n-1] - x[0]) / (n - 1)`` from the rebased
    series. The result starts and ends at exactly 0, and applying this
    twice is the same as applying it once.
    """
    values = levels.values
    n = len(values)
    if n < 2:
        raise SizeError("detrending needs at least 2 samples")

    mu = (values[-1] - values[0]) / (n - 1)
    out = rebase(levels).values - mu * np.arange(n)
    out[0] = 0.0
    out[-1] = 0.0
    return levels.replace(out, detrended=True)


def increments(levels, lag_steps, overlapping=False):
    """
    Returns the increments ``x(t) - x(t - T)`` of ``levels`` at lag
    ``T = lag_steps``. Overlapping increments end at every index from
    ``T``; non-overlapping ones end at ``T, 2T, 3T, ...``.
    """
    values = levels.values if isinstance(levels, LevelSeries) else np.asarray(levels, float)
    lag_steps = int(lag_steps)
    if lag_steps < 1:
        raise SizeError("lag_steps must be a positive integer")
    if lag_steps >= len(values):
        raise SizeError("lag %d does not fit a series of length %d" % (lag_steps, len(values)))

    stride = 1 if overlapping else lag_steps
    starts = np.arange(lag_steps, len(values), stride)
    return IncrementSeries(lag_steps, starts, values[starts] - values[starts - lag_steps],
                           overlapping=overlapping)


def ensemble_split(levels, window_steps):
    """
    Splits one long series into ``n // window_steps`` consecutive,
    non-overlapping windows, each rebased to start at 0. Tail samples
    that do not fill a window are dropped and counted in
    ``Ensemble.discarded``.
    """
    n = len(levels)
    window_steps = int(window_steps)
    if window_steps < 2:
        raise SizeError("window_steps must be at least 2")
    if window_steps > n:
        raise SizeError("window of %d steps is longer than the series (%d)" % (window_steps, n))

    members = n // window_steps
    paths = levels.values[:members * window_steps].reshape(members, window_steps)
    paths = paths - paths[:, :1]
    discarded = n - members * window_steps
    log.debug("split %d samples into %d members of %d, discarded %d",
              n, members, window_steps, discarded)
    return Ensemble(paths, step=levels.step, discarded=discarded, origin="split")
