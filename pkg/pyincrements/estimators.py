"""
Ensemble statistics over increments: the process variance curve, mean
square fluctuations, increment autocorrelations (directly and through
the squared-span identity), binned increment densities, conditional
mean square fluctuations, and the stationarity and variance-linearity
tests built from them.

Every estimator averages across ensemble members at fixed times.
Standard errors are the cross-member sample standard deviation over
``sqrt(member_count)``; members are treated as independent, which only
approximately holds for ensembles split from one series.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import ks_2samp

from .binspec import BinSpec
from .errors import SizeError, UsageError

log = logging.getLogger(__name__)

MIN_PROBE_SAMPLES = 200
MIN_BIN_COUNT = 50
LINEARITY_TOLERANCE = 0.05

STATIONARY = "stationary"
NONSTATIONARY = "nonstationary"
LINEAR = "linear"
NONLINEAR = "nonlinear"
INCONCLUSIVE = "inconclusive"

DIRECT = "direct"
IDENTITY = "identity"

LEVEL_X = "level_x"
PREVIOUS_SQUARED_INCREMENT = "previous_squared_increment"
CONDITIONINGS = (LEVEL_X, PREVIOUS_SQUARED_INCREMENT)


@dataclass(frozen=True, eq=False)
class VarianceCurve(object):
    times: np.ndarray
    variances: np.ndarray
    stderrs: np.ndarray
    member_count: int
    means: Optional[np.ndarray] = None
    covariance: Optional[np.ndarray] = None


@dataclass(frozen=True)
class MsfEstimate(object):
    t: int
    lag_steps: int
    value: float
    stderr: float
    sample_count: int


@dataclass(frozen=True)
class AutocorrEstimate(object):
    """
    ``<x(t,-T) x(t,T)>`` together with the two mean square fluctuations
    of the same sample, which bound it by Cauchy-Schwarz.
    """
    t: int
    lag_steps: int
    value: float
    stderr: float
    sample_count: int
    method: str
    msf_backward: float
    msf_forward: float

    @property
    def bound(self):
        return math.sqrt(self.msf_backward * self.msf_forward)

    @property
    def zscore(self):
        if self.stderr > 0:
            return self.value / self.stderr
        return 0.0 if self.value == 0 else math.copysign(math.inf, self.value)


@dataclass(frozen=True, eq=False)
class DensityHistogram(object):
    """
    Normalized histogram of ``x(t+T) - x(t)``. Samples outside the
    binned interval are counted in ``outside_count`` and excluded from
    the normalization.
    """
    bin_edges: np.ndarray
    masses: np.ndarray
    t: int
    lag_steps: int
    sample_count: int
    outside_count: int = 0

    @property
    def densities(self):
        return self.masses / np.diff(self.bin_edges)


@dataclass(frozen=True, eq=False)
class ConditionalMsfTable(object):
    """
    Mean squared forward increment per bin of the conditioning
    variable. Bins holding fewer than ``min_count`` samples report NaN.
    ``centers`` holds the mean conditioning value inside each bin.
    """
    conditioning: str
    lag_steps: int
    times: tuple
    bin_edges: np.ndarray
    values: np.ndarray
    stderrs: np.ndarray
    counts: np.ndarray
    centers: np.ndarray
    min_count: int

    @property
    def populated(self):
        return self.counts >= self.min_count

    @property
    def midpoints(self):
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    def line(self):
        """
        Fits ``value = intercept + slope * center`` over the populated
        bins, weighting each bin by its count, and returns
        ``(intercept, slope, slope_stderr)``. The standard error is the
        sandwich estimate built from the per-bin standard errors.
        """
        mask = self.populated
        if mask.sum() < 2:
            raise SizeError("a line needs at least 2 populated bins, got %d" % mask.sum())
        x = self.centers[mask]
        y = self.values[mask]
        w = self.counts[mask].astype(float)
        se = self.stderrs[mask]

        design = np.column_stack([np.ones_like(x), x])
        weighted = design * w[:, None]
        bread = np.linalg.inv(design.T @ weighted)
        beta = bread @ (weighted.T @ y)
        meat = (weighted * (se ** 2)[:, None]).T @ weighted
        cov = bread @ meat @ bread
        return float(beta[0]), float(beta[1]), float(math.sqrt(max(cov[1, 1], 0.0)))


@dataclass(frozen=True, eq=False)
class StationarityReport(object):
    """
    Two-sample KS distances between the increment sample at each probe
    time and the one at the earliest probe (whose own distance is 0).
    """
    lag_steps: int
    probe_times: tuple
    ks_statistics: np.ndarray
    threshold: float
    significance: float
    sample_count: int
    verdict: str


@dataclass(frozen=True)
class LinearityReport(object):
    intercept: float
    slope: float
    intercept_stderr: float
    slope_stderr: float
    max_relative_residual: float
    max_residual_z: float
    r_squared: float
    tolerance: float
    verdict: str


def _mean_stderr(samples):
    count = len(samples)
    mean = float(np.mean(samples))
    if count < 2:
        return mean, 0.0
    return mean, float(np.std(samples, ddof=1) / math.sqrt(count))


def _index(t, name="t"):
    if int(t) != t:
        raise SizeError("%s must be an integer index, got %r" % (name, t))
    return int(t)


def _lag(lag_steps):
    lag_steps = _index(lag_steps, "lag_steps")
    if lag_steps < 1:
        raise SizeError("lag_steps must be a positive integer, got %d" % lag_steps)
    return lag_steps


def _adjacent(ens, t, lag_steps):
    """Returns ``(x(t) - x(t-T), x(t+T) - x(t))`` across members."""
    t = _index(t)
    lag_steps = _lag(lag_steps)
    if t < lag_steps or t + lag_steps >= ens.length:
        raise SizeError("need T <= t and t + T < %d, got t=%d T=%d" % (ens.length, t, lag_steps))
    here = ens.paths[:, t]
    return here - ens.paths[:, t - lag_steps], ens.paths[:, t + lag_steps] - here


def forward_increments(ens, t, lag_steps):
    """Returns ``x(t+T) - x(t)`` across members."""
    t = _index(t)
    lag_steps = _lag(lag_steps)
    if t < 0 or t + lag_steps >= ens.length:
        raise SizeError("need 0 <= t and t + T < %d, got t=%d T=%d" % (ens.length, t, lag_steps))
    return ens.paths[:, t + lag_steps] - ens.paths[:, t]


def variance_curve(ens, probe_times):
    """
    Estimates ``sigma**2(t) = <x(t)**2>`` at each probe time. The mean
    of ``x(t)`` is reported alongside in ``means``. Since every probe
    uses the same members the estimates are correlated; ``covariance``
    holds their estimated covariance matrix.
    """
    times = [_index(t) for t in probe_times]
    squares = np.vstack([ens.column(t) ** 2 for t in times])
    variances, stderrs = [], []
    for row in squares:
        value, stderr = _mean_stderr(row)
        variances.append(value)
        stderrs.append(stderr)
    means = [float(np.mean(ens.column(t))) for t in times]
    covariance = None
    if ens.member_count > 1:
        covariance = np.atleast_2d(np.cov(squares, ddof=1)) / ens.member_count
    return VarianceCurve(np.array(times), np.array(variances), np.array(stderrs),
                         ens.member_count, np.array(means), covariance)


def msf(ens, t, lag_steps):
    """Estimates the mean square fluctuation ``<(x(t) - x(t-T))**2>``."""
    t = _index(t)
    lag_steps = _lag(lag_steps)
    if t < lag_steps or t >= ens.length:
        raise SizeError("need T <= t < %d, got t=%d T=%d" % (ens.length, t, lag_steps))
    z = ens.paths[:, t] - ens.paths[:, t - lag_steps]
    value, stderr = _mean_stderr(z * z)
    return MsfEstimate(t, lag_steps, value, stderr, ens.member_count)


def msf_by_lag(ens, lags, t=None):
    """
    Mean square fluctuation per lag. Without ``t`` each lag ``T`` is
    measured on the first increment ``x(T) - x(0)``.
    """
    return [msf(ens, lag if t is None else t, lag) for lag in lags]


def increment_autocorr_direct(ens, t, lag_steps):
    """Estimates ``<x(t,-T) x(t,T)>`` as the mean product of adjacent increments."""
    back, fwd = _adjacent(ens, t, lag_steps)
    value, stderr = _mean_stderr(back * fwd)
    return AutocorrEstimate(int(t), int(lag_steps), value, stderr, ens.member_count, DIRECT,
                            float(np.mean(back * back)), float(np.mean(fwd * fwd)))


def increment_autocorr_identity(ens, t, lag_steps):
    """
    Estimates ``<x(t,-T) x(t,T)>`` as half of
    ``<(x(t+T) - x(t-T))**2> - <x(t,-T)**2> - <x(t,T)**2>``, on the same
    members as :py:func:`increment_autocorr_direct`.
    """
    t, lag_steps = _index(t), _lag(lag_steps)
    back, fwd = _adjacent(ens, t, lag_steps)
    span = ens.paths[:, t + lag_steps] - ens.paths[:, t - lag_steps]
    msf_span = float(np.mean(span * span))
    msf_back = float(np.mean(back * back))
    msf_fwd = float(np.mean(fwd * fwd))
    value = 0.5 * (msf_span - msf_back - msf_fwd)
    _, stderr = _mean_stderr(0.5 * (span * span - back * back - fwd * fwd))
    return AutocorrEstimate(int(t), int(lag_steps), value, stderr, ens.member_count, IDENTITY,
                            msf_back, msf_fwd)


def increment_density(ens, t, lag_steps, bin_spec=None):
    """Returns the normalized histogram of ``x(t+T) - x(t)`` across members."""
    bin_spec = bin_spec or BinSpec()
    z = forward_increments(ens, t, lag_steps)
    edges = bin_spec.edges(z)
    counts, _ = np.histogram(z, edges)
    inside = int(counts.sum())
    if inside == 0:
        raise SizeError("no increments fall inside the binned interval")
    return DensityHistogram(edges, counts / float(inside), int(t), int(lag_steps),
                            len(z), len(z) - inside)


def ks_critical_value(significance, n1, n2):
    """Asymptotic two-sample KS critical value at the given significance."""
    c = math.sqrt(-0.5 * math.log(significance / 2.0))
    return c * math.sqrt((n1 + n2) / float(n1 * n2))


def stationarity_test(ens, lag_steps, probe_times, significance=0.01,
                      min_samples=MIN_PROBE_SAMPLES):
    """
    Tests ``f(z, t, t+T) = f(z, t0, t0+T)`` by comparing the increment
    sample at every probe time with the one at the earliest probe
    ``t0``. The verdict is ``stationary`` when every KS distance is
    below the critical value at ``significance``, Bonferroni-corrected
    over the comparisons, and ``inconclusive`` with fewer than two
    probes or fewer than ``min_samples`` members.
    """
    if not 0 < significance < 1:
        raise UsageError("significance must lie in (0, 1), got %r" % significance)
    lag_steps = _lag(lag_steps)
    probes = tuple(sorted(set(_index(t) for t in probe_times)))
    samples = [forward_increments(ens, t, lag_steps) for t in probes]
    count = ens.member_count

    if len(probes) < 2:
        return StationarityReport(lag_steps, probes, np.zeros(len(probes)), math.nan,
                                  significance, count, INCONCLUSIVE)

    reference = samples[0]
    stats = [0.0]
    for sample in samples[1:]:
        stats.append(float(ks_2samp(reference, sample, method="asymp").statistic))
    stats = np.array(stats)
    threshold = ks_critical_value(significance / (len(probes) - 1), count, count)

    if count < min_samples:
        verdict = INCONCLUSIVE
    elif np.all(stats < threshold):
        verdict = STATIONARY
    else:
        verdict = NONSTATIONARY
    log.debug("stationarity T=%d probes=%s max KS=%.4g threshold=%.4g -> %s",
              lag_steps, probes, stats.max(), threshold, verdict)
    return StationarityReport(lag_steps, probes, stats, threshold, significance, count, verdict)


def _bin_index(values, edges):
    idx = np.searchsorted(edges, values, side="right") - 1
    # the last bin is closed on the right
    idx[values == edges[-1]] = len(edges) - 2
    return idx


def conditional_msf(ens, t, lag_steps, conditioning=PREVIOUS_SQUARED_INCREMENT,
                    bin_spec=None, min_count=MIN_BIN_COUNT):
    """
    Bins members by the conditioning variable at time ``t`` (the level
    ``x(t)``, or the previous squared increment ``(x(t) - x(t-T))**2``)
    and reports the mean squared forward increment
    ``(x(t+T) - x(t))**2`` per bin.

    ``t`` may be a sequence of times, in which case the pairs from all
    of them are pooled into one table.
    """
    if conditioning not in CONDITIONINGS:
        raise UsageError("conditioning must be one of %s, not %r"
                         % (", ".join(CONDITIONINGS), conditioning))
    bin_spec = bin_spec or BinSpec()
    lag_steps = _lag(lag_steps)
    times = (t,) if np.isscalar(t) else tuple(t)
    if not times:
        raise SizeError("conditional_msf needs at least one time")

    conds, squares = [], []
    for when in times:
        if conditioning == LEVEL_X:
            fwd = forward_increments(ens, when, lag_steps)
            conds.append(ens.paths[:, when])
        else:
            back, fwd = _adjacent(ens, when, lag_steps)
            conds.append(back * back)
        squares.append(fwd * fwd)
    cond = np.concatenate(conds)
    square = np.concatenate(squares)

    edges = bin_spec.edges(cond, nonnegative=(conditioning == PREVIOUS_SQUARED_INCREMENT))
    bins = bin_spec.count
    idx = _bin_index(cond, edges)
    inside = (idx >= 0) & (idx < bins)
    idx, cond, square = idx[inside], cond[inside], square[inside]

    counts = np.bincount(idx, minlength=bins)
    populated = counts >= min_count
    if not populated.any():
        raise SizeError("every bin holds fewer than %d samples" % min_count)

    safe = np.maximum(counts, 1)
    means = np.bincount(idx, weights=square, minlength=bins) / safe
    centers = np.bincount(idx, weights=cond, minlength=bins) / safe
    dev = square - means[idx]
    ss = np.bincount(idx, weights=dev * dev, minlength=bins)
    stderrs = np.sqrt(ss / np.maximum(counts - 1, 1)) / np.sqrt(safe)

    nan = np.full(bins, np.nan)
    return ConditionalMsfTable(conditioning, lag_steps, tuple(int(w) for w in times), edges,
                               np.where(populated, means, nan),
                               np.where(populated, stderrs, nan), counts,
                               np.where(populated, centers, nan), min_count)


def linearity_test(curve, tolerance=LINEARITY_TOLERANCE):
    """
    Fits ``sigma**2(t) = a + b * t`` by weighted least squares (weights
    ``1 / stderr**2``; ordinary least squares when any standard error is
    zero) and judges the fit:

      - ``linear``: max relative residual <= ``tolerance`` and ``a``
        within 3 standard errors of 0.
      - ``nonlinear``: ``a`` beyond 3 standard errors, or a relative
        residual above ``tolerance`` that is also more than 3 point
        standard errors.
      - ``inconclusive``: anything else.
    """
    t = np.asarray(curve.times, dtype=float)
    y = np.asarray(curve.variances, dtype=float)
    se = np.asarray(curve.stderrs, dtype=float)
    if len(t) < 3:
        raise SizeError("linearity needs at least 3 probe times, got %d" % len(t))
    if len(np.unique(t)) < len(t):
        raise SizeError("linearity needs distinct probe times, got %s" % t.tolist())

    design = np.column_stack([np.ones_like(t), t])
    if np.all(se > 0):
        w = 1.0 / se ** 2
        weighted = design * w[:, None]
        cov = np.linalg.inv(design.T @ weighted)
        beta = cov @ (weighted.T @ y)
        covariance = getattr(curve, "covariance", None)
        if covariance is not None:
            # sandwich form for probes that share members
            cov = cov @ (weighted.T @ covariance @ weighted) @ cov
    else:
        w = np.ones_like(t)
        beta = np.linalg.lstsq(design, y, rcond=None)[0]
        rss = float(np.sum((y - design @ beta) ** 2))
        cov = rss / (len(t) - 2) * np.linalg.inv(design.T @ design)

    a, b = float(beta[0]), float(beta[1])
    se_a = math.sqrt(max(cov[0, 0], 0.0))
    se_b = math.sqrt(max(cov[1, 1], 0.0))
    fitted = a + b * t
    resid = y - fitted
    scale = float(np.max(np.abs(y))) or 1.0
    slack = 1e-9 * scale

    with np.errstate(divide="ignore", invalid="ignore"):
        relative = np.where(fitted > 0, np.abs(resid) / fitted, np.inf)
        relative = np.where(np.abs(resid) <= slack, 0.0, relative)
        zs = np.where(se > 0, np.abs(resid) / se, np.inf)
        zs = np.where(np.abs(resid) <= slack, 0.0, zs)
    max_rel = float(np.max(relative))
    max_z = float(np.max(zs))

    ybar = np.sum(w * y) / np.sum(w)
    total = float(np.sum(w * (y - ybar) ** 2))
    r_squared = 1.0 - float(np.sum(w * resid ** 2)) / total if total > 0 else 1.0

    intercept_ok = abs(a) <= 3.0 * se_a + slack
    if intercept_ok and max_rel <= tolerance:
        verdict = LINEAR
    elif not intercept_ok or (max_rel > tolerance and max_z > 3.0):
        verdict = NONLINEAR
    else:
        verdict = INCONCLUSIVE
    log.debug("linearity a=%.4g+-%.2g b=%.4g max_rel=%.3g -> %s", a, se_a, b, max_rel, verdict)
    return LinearityReport(a, b, se_a, se_b, max_rel, max_z, r_squared, tolerance, verdict)
