"""
Composes the estimators and per-lag fits into a falsification report.

Four properties of the increments are measured on an ensemble split
from one series: stationarity, uncorrelatedness, linear growth of the
variance, and conditional memory (a rising conditional mean square
fluctuation). The report records how they co-occur. Conditional memory
together with stationary, uncorrelated increments is flagged as a
contradiction, because ARCH-type memory has been argued to be
impossible under exactly those two conditions. The flag is a
co-occurrence check on measurements and not a claim about the data.

Every three-valued verdict is monotone in ``significance``: a property
fails (or memory is present) when its Bonferroni-adjusted evidence is
below ``significance``, passes when the evidence is at least
``max(significance, PASS_LEVEL)``, and is inconclusive in between.
Lowering ``significance`` can therefore only move a verdict towards
inconclusive.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from . import estimators
from .binspec import DEFAULT_BINS, BinSpec
from .errors import SizeError, UsageError
from .model_fit import GARCH11, fit_arch1_by_lag
from .plot_data import PlotDataset
from .series_core import DETRENDING_METHOD, detrend, ensemble_split

log = logging.getLogger(__name__)

DEFAULT_LAGS = (1, 2, 4, 8)
DEFAULT_SIGNIFICANCE = 0.01
PASS_LEVEL = 0.05
MIN_MEMBERS = 100
STATIONARITY_PROBES = 5
MAX_AUTOCORR_PROBES = 64
VARIANCE_PROBES = 12

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
PRESENT = "present"
ABSENT = "absent"

CONSISTENT = "consistent"
ALPHA_MUST_VANISH = "alpha_must_vanish"
OMEGA_MUST_VANISH = "omega_must_vanish"
VIOLATED = "violated"
CONSTRAINTS_FORCED = "constraints_forced"

WHITE_NOISE_CONSISTENT = "white_noise_consistent"
MEMORY_DETECTED = "memory_detected"
CONTRADICTION_FLAGGED = "contradiction_flagged"
CONSISTENCY_VERDICTS = (WHITE_NOISE_CONSISTENT, MEMORY_DETECTED, CONTRADICTION_FLAGGED)

CLAIM = "ARCH(1) is inconsistent with stationary, uncorrelated increments."
TRADING_LAG_NOTE = ("Memory is expected to be absent in market returns only at lag times of "
                    "10 minutes or more; shorter lags require T < 10 min of trading time. "
                    "This is recorded for reference and is not checked against the data.")
SPLIT_NOTE = ("Ensemble members are consecutive windows of one series, treated as independent "
              "realizations started at x(0) = 0; standard errors assume that independence.")
FIT_NOTE = ("ARCH(1) parameters are fitted independently per lag by least squares of the "
            "squared increment on the previous squared increment.")


def _lags(lags):
    lags = tuple(sorted(set(int(lag) for lag in lags)))
    if not lags:
        raise UsageError("at least one lag is required")
    if lags[0] < 1:
        raise SizeError("lags must be positive integers, got %d" % lags[0])
    return lags


def _bins(bin_spec):
    return bin_spec if isinstance(bin_spec, BinSpec) else BinSpec(bin_spec or DEFAULT_BINS)


def _check_significance(significance):
    if not 0 < significance < 1:
        raise UsageError("significance must lie in (0, 1), got %r" % (significance,))


def _graded(p_value, significance, low=FAIL, high=PASS):
    """Maps an adjusted p-value onto the monotone three-valued scale."""
    if p_value is None or not np.isfinite(p_value):
        return INCONCLUSIVE
    if p_value < significance:
        return low
    if p_value >= max(significance, PASS_LEVEL):
        return high
    return INCONCLUSIVE


def _bonferroni(p_values):
    p_values = [p for p in p_values if p is not None and np.isfinite(p)]
    if not p_values:
        return None
    return min(1.0, len(p_values) * min(p_values))


def _grid(first, last, count):
    if last < first:
        return ()
    points = np.rint(np.linspace(first, last, min(count, last - first + 1)))
    return tuple(int(t) for t in np.unique(points))


def stationarity_probes(length, lag_steps, count=STATIONARITY_PROBES):
    """Probe times spread over a member, earliest first at ``t = 0``."""
    return _grid(0, length - 1 - lag_steps, count)


def autocorr_probes(length, lag_steps, count=MAX_AUTOCORR_PROBES):
    """At most ``count`` times ``t`` with ``T <= t`` and ``t + T < length``."""
    return _grid(lag_steps, length - 1 - lag_steps, count)


def variance_probes(length, count=VARIANCE_PROBES):
    """A geometric grid of times from 1 to the last index of a member."""
    points = np.rint(np.geomspace(1, length - 1, count))
    return tuple(int(t) for t in np.unique(points))


def memory_times(length, lag_steps):
    """Times ``T, 3T, 5T, ...`` whose backward and forward increments never overlap."""
    return tuple(range(lag_steps, length - lag_steps, 2 * lag_steps))


@dataclass(frozen=True, eq=False)
class MemoryEstimate(object):
    """Slope of the pooled conditional mean square fluctuation at one lag."""
    lag_steps: int
    intercept: float
    slope: float
    slope_stderr: float
    p_value: float
    table: object = None


@dataclass(frozen=True, eq=False)
class DiagnosticsReport(object):
    """
    Measured properties of an ensemble: the per-lag estimator outputs
    and the four verdicts ``increment_stationarity``,
    ``uncorrelated_increments``, ``variance_linearity`` and
    ``conditional_memory``.
    """
    lags: tuple
    significance: float
    member_count: int
    member_length: int
    stationarity: dict
    autocorrelations: dict
    variance: object
    linearity: object
    memory: dict
    msf_by_lag: tuple
    densities: dict
    verdicts: dict
    evidence: dict

    def estimates(self):
        """The numeric findings, keyed for a report's ``estimates`` section."""
        out = {}
        out["stationarity"] = {
            str(lag): {"probe_times": rep.probe_times, "ks_statistics": rep.ks_statistics,
                       "threshold": rep.threshold, "sample_count": rep.sample_count,
                       "verdict": rep.verdict}
            for lag, rep in self.stationarity.items()}
        out["autocorrelation"] = {
            str(lag): {"t": [e.t for e in ests], "value": [e.value for e in ests],
                       "stderr": [e.stderr for e in ests]}
            for lag, ests in self.autocorrelations.items()}
        out["variance_curve"] = {"t": self.variance.times, "variance": self.variance.variances,
                                 "stderr": self.variance.stderrs}
        out["linearity"] = self.linearity
        out["conditional_memory"] = {
            str(lag): {"intercept": m.intercept, "slope": m.slope,
                       "slope_stderr": m.slope_stderr, "p_value": m.p_value}
            for lag, m in self.memory.items()}
        out["msf_by_lag"] = {str(e.lag_steps): {"value": e.value, "stderr": e.stderr}
                             for e in self.msf_by_lag}
        out["evidence"] = self.evidence
        return out

    def plot_datasets(self):
        datasets = [PlotDataset("variance_curve", ("t", "variance", "stderr"),
                                zip(self.variance.times, self.variance.variances,
                                    self.variance.stderrs),
                                "ensemble variance <x(t)^2> against t")]
        datasets.append(PlotDataset("msf_by_lag", ("lag", "msf", "stderr", "msf_per_step"),
                                    [(e.lag_steps, e.value, e.stderr, e.value / e.lag_steps)
                                     for e in self.msf_by_lag],
                                    "mean square fluctuation <x(0,T)^2> against T"))
        for lag, ests in self.autocorrelations.items():
            datasets.append(PlotDataset("autocorr_T%d" % lag, ("t", "value", "stderr"),
                                        [(e.t, e.value, e.stderr) for e in ests],
                                        "increment autocorrelation <x(t,-T) x(t,T)> against t"))
        for lag, hist in self.densities.items():
            edges = hist.bin_edges
            datasets.append(PlotDataset("density_T%d" % lag,
                                        ("bin_lower", "bin_upper", "mass", "density"),
                                        zip(edges[:-1], edges[1:], hist.masses, hist.densities),
                                        "histogram of x(T) - x(0)"))
        for lag, mem in self.memory.items():
            table = mem.table
            if table is None:
                continue
            edges = table.bin_edges
            datasets.append(PlotDataset(
                "conditional_msf_T%d" % lag,
                ("bin_lower", "bin_upper", "center", "value", "stderr", "count"),
                zip(edges[:-1], edges[1:], table.centers, table.values, table.stderrs,
                    table.counts),
                "mean squared forward increment per bin of the previous squared increment"))
        return datasets


def _stationarity(ens, lags, significance):
    strict, loose, reports = [], [], {}
    level = max(significance, PASS_LEVEL)
    for lag in lags:
        probes = stationarity_probes(ens.length, lag)
        strict_report = estimators.stationarity_test(ens, lag, probes, significance / len(lags))
        loose_report = estimators.stationarity_test(ens, lag, probes, level / len(lags))
        strict.append(strict_report.verdict)
        loose.append(loose_report.verdict)
        reports[lag] = strict_report
    if estimators.NONSTATIONARY in strict:
        verdict = FAIL
    elif all(v == estimators.STATIONARY for v in loose):
        verdict = PASS
    else:
        verdict = INCONCLUSIVE
    return reports, verdict


def _autocorrelations(ens, lags):
    estimates, p_values = {}, []
    for lag in lags:
        ests = [estimators.increment_autocorr_identity(ens, t, lag)
                for t in autocorr_probes(ens.length, lag)]
        estimates[lag] = ests
        p_values.extend(2.0 * norm.sf(abs(e.zscore)) for e in ests)
    return estimates, _bonferroni(p_values)


def _memory(ens, lag, bin_spec):
    try:
        table = estimators.conditional_msf(ens, memory_times(ens.length, lag), lag,
                                           estimators.PREVIOUS_SQUARED_INCREMENT, bin_spec)
        intercept, slope, stderr = table.line()
    except SizeError as exc:
        log.info("no conditional memory estimate at T=%d: %s", lag, exc)
        return MemoryEstimate(lag, math.nan, math.nan, math.nan, math.nan)
    if stderr > 0:
        p_value = float(norm.sf(slope / stderr))
    else:
        p_value = 0.0 if slope > 0 else 1.0
    return MemoryEstimate(lag, intercept, slope, stderr, p_value, table)


def diagnostics_report(ens, lags=DEFAULT_LAGS, significance=DEFAULT_SIGNIFICANCE, bin_spec=None):
    """
    Measures stationarity, uncorrelatedness, variance linearity and
    conditional memory of ``ens`` at each lag and grades them.

    Raises :py:class:`SizeError` when a member is too short for the
    largest lag or for a variance curve.
    """
    _check_significance(significance)
    lags = _lags(lags)
    bin_spec = _bins(bin_spec)
    length = ens.length
    if length < 2 * lags[-1] + 1:
        raise SizeError("members of length %d are too short for lag %d; need at least %d"
                        % (length, lags[-1], 2 * lags[-1] + 1))
    if length < 4:
        raise SizeError("members need at least 4 samples for a variance curve")

    stationarity, stationarity_verdict = _stationarity(ens, lags, significance)
    autocorrelations, autocorr_p = _autocorrelations(ens, lags)

    variance = estimators.variance_curve(ens, variance_probes(length))
    linearity = estimators.linearity_test(variance)
    linearity_verdict = {estimators.LINEAR: PASS,
                         estimators.NONLINEAR: FAIL}.get(linearity.verdict, INCONCLUSIVE)

    memory = {lag: _memory(ens, lag, bin_spec) for lag in lags}
    memory_p = _bonferroni([m.p_value for m in memory.values()])

    verdicts = {
        "increment_stationarity": stationarity_verdict,
        "uncorrelated_increments": _graded(autocorr_p, significance),
        "variance_linearity": linearity_verdict,
        "conditional_memory": _graded(memory_p, significance, low=PRESENT, high=ABSENT),
    }
    log.info("diagnostics over %d members of length %d: %s", ens.member_count, length,
             ", ".join("%s=%s" % item for item in verdicts.items()))
    return DiagnosticsReport(
        lags, significance, ens.member_count, length, stationarity, autocorrelations,
        variance, linearity, memory,
        tuple(estimators.msf_by_lag(ens, lags)),
        {lag: estimators.increment_density(ens, 0, lag, bin_spec) for lag in lags},
        verdicts,
        {"uncorrelated_adjusted_p": autocorr_p, "memory_adjusted_p": memory_p})


def white_noise_consistency(fits_by_lag, linearity, tol=None):
    """
    Checks per-lag ARCH(1) fits against the white-noise requirement
    ``alpha(T) / (1 - omega(T)) = T * <x(0,1)**2>``. With ``T != 0`` that
    leaves only ``omega(T) = 0``, and then ``alpha(T)`` proportional to
    ``T``.

    Returns ``violated`` when the variance curve is not linear,
    ``omega_must_vanish`` when some ``omega(T)`` is further than ``tol``
    from 0, ``alpha_must_vanish`` when the ``alpha(T)`` are not
    proportional to ``T``, and ``consistent`` otherwise. Without ``tol``
    each lag uses 3 standard errors of its own slope estimate.
    """
    if len(fits_by_lag) < 2:
        raise SizeError("white-noise consistency needs fits at 2 or more lags, got %d"
                        % len(fits_by_lag))
    if linearity.verdict == estimators.NONLINEAR:
        return VIOLATED

    lags = sorted(fits_by_lag)
    for lag in lags:
        fit = fits_by_lag[lag]
        limit = 3.0 * fit.stderrs["omega"] if tol is None else tol
        if abs(fit.estimates["omega"]) > limit:
            log.debug("omega(%d)=%.4g outside %.4g", lag, fit.estimates["omega"], limit)
            return OMEGA_MUST_VANISH

    alphas = np.array([fits_by_lag[lag].estimates["alpha"] for lag in lags])
    stderrs = np.array([fits_by_lag[lag].stderrs["alpha"] for lag in lags])
    t = np.array(lags, dtype=float)
    if np.all(stderrs > 0):
        w = (t / stderrs) ** 2
        per_step = float(np.sum(w * alphas / t) / np.sum(w))
    else:
        per_step = float(np.mean(alphas / t))
    slack = 1e-9 * float(np.max(np.abs(alphas)) or 1.0)
    if np.any(np.abs(alphas - per_step * t) > 3.0 * stderrs + slack):
        return ALPHA_MUST_VANISH
    return CONSISTENT


def garch_white_noise_check(fit, tol=None):
    """
    White noise forces a GARCH(1,1) fit to ``alpha = 0`` and
    ``omega + zeta = 0``. Returns ``consistent`` when both estimates are
    within ``tol`` of 0 (3 standard errors when ``tol`` is ``None``) and
    ``constraints_forced`` otherwise.
    """
    if fit.model != GARCH11:
        raise UsageError("garch_white_noise_check needs a garch11 fit, not %s" % fit.model)
    alpha = fit.estimates["alpha"]
    persistence = fit.estimates["omega"] + fit.estimates["zeta"]
    if tol is None:
        alpha_tol = 3.0 * fit.stderrs["alpha"]
        persistence_tol = 3.0 * math.hypot(fit.stderrs["omega"], fit.stderrs["zeta"])
    else:
        alpha_tol = persistence_tol = tol
    if abs(alpha) <= alpha_tol and abs(persistence) <= persistence_tol:
        return CONSISTENT
    return CONSTRAINTS_FORCED


def consistency_verdict(verdicts):
    """Aggregates the four property verdicts into the overall verdict."""
    memory = verdicts["conditional_memory"]
    stationary = verdicts["increment_stationarity"] == PASS
    uncorrelated = verdicts["uncorrelated_increments"] == PASS
    if memory == PRESENT and stationary and uncorrelated:
        return CONTRADICTION_FLAGGED
    if (memory == ABSENT and stationary and uncorrelated
            and verdicts["variance_linearity"] == PASS):
        return WHITE_NOISE_CONSISTENT
    return MEMORY_DETECTED


def narrative(verdicts, verdict, member_count, window_steps, lags):
    text = ("Measured over %d windows of %d samples at lags %s: increment stationarity %s, "
            "uncorrelated increments %s, variance linearity %s, conditional memory %s."
            % (member_count, window_steps, ",".join(str(lag) for lag in lags),
               verdicts["increment_stationarity"], verdicts["uncorrelated_increments"],
               verdicts["variance_linearity"], verdicts["conditional_memory"]))
    if verdict == CONTRADICTION_FLAGGED:
        text += (" Conditional memory co-occurs with stationary, uncorrelated increments."
                 " Claim under test: \"%s\" The measured triple is reported as found." % CLAIM)
    elif verdict == WHITE_NOISE_CONSISTENT:
        text += " No conditional memory was found; the increments are consistent with white noise."
    else:
        text += (" The measured properties do not form the stationary, uncorrelated, "
                 "memory-bearing combination; no contradiction is flagged.")
    return text


@dataclass(frozen=True, eq=False)
class FalsificationReport(object):
    source: dict
    lags: tuple
    window_steps: int
    significance: float
    diagnostics: DiagnosticsReport
    fits: dict
    msf_profile: dict
    white_noise: str
    consistency_verdict: str
    narrative: str
    metadata: dict = field(default_factory=dict)

    @property
    def verdicts(self):
        return self.diagnostics.verdicts

    def estimates(self):
        out = self.diagnostics.estimates()
        out["arch1_fits"] = {str(lag): fit for lag, fit in self.fits.items()}
        out["msf_profile"] = {str(lag): value for lag, value in self.msf_profile.items()}
        return out

    def plot_datasets(self):
        datasets = self.diagnostics.plot_datasets()
        datasets.append(PlotDataset(
            "msf_profile", ("lag", "alpha", "omega", "unconditional_msf"),
            [(lag, fit.estimates["alpha"], fit.estimates["omega"], self.msf_profile[lag])
             for lag, fit in self.fits.items()],
            "per-lag ARCH(1) fits and alpha(T) / (1 - omega(T))"))
        return datasets


def _source(series):
    prov = series.provenance
    if prov is None:
        return {"kind": "series", "points": len(series), "step": series.step}
    return {"kind": "file", "path": prov.path, "sha256": prov.digest, "rows": prov.rows,
            "step": series.step}


def falsification_report(series, window_steps, lags=DEFAULT_LAGS,
                         significance=DEFAULT_SIGNIFICANCE, bin_spec=None, source=None):
    """
    Runs the whole pipeline on one level series: detrend, split into
    windows of ``window_steps`` samples, measure the four properties,
    fit ARCH(1) per lag on the detrended series, check the fits against
    white noise and aggregate the verdict.

    Raises :py:class:`SizeError` when the series holds fewer than
    ``MIN_MEMBERS`` windows.
    """
    _check_significance(significance)
    lags = _lags(lags)
    window_steps = int(window_steps)
    if window_steps < 2:
        raise SizeError("window_steps must be at least 2")
    minimum = MIN_MEMBERS * window_steps
    if len(series) < minimum:
        raise SizeError("falsification needs at least %d samples (%d windows of %d), got %d"
                        % (minimum, MIN_MEMBERS, window_steps, len(series)))

    bin_spec = _bins(bin_spec)
    levels = series if series.detrended else detrend(series)
    ens = ensemble_split(levels, window_steps)
    diagnostics = diagnostics_report(ens, lags, significance, bin_spec)

    fits = fit_arch1_by_lag(levels, lags)
    profile = {lag: fit.unconditional_msf for lag, fit in fits.items()}
    if len(lags) >= 2:
        white_noise = white_noise_consistency(fits, diagnostics.linearity)
    else:
        white_noise = INCONCLUSIVE

    verdict = consistency_verdict(diagnostics.verdicts)
    log.info("falsification verdict: %s (white-noise fit check: %s)", verdict, white_noise)

    metadata = {
        "detrending_method": DETRENDING_METHOD,
        "detrended_on_input": bool(series.detrended),
        "discarded_samples": ens.discarded,
        "split_note": SPLIT_NOTE,
        "fit_note": FIT_NOTE,
        "trading_lag_note": TRADING_LAG_NOTE,
        "claim_under_test": CLAIM,
        "thresholds": {
            "significance": significance,
            "pass_level": PASS_LEVEL,
            "linearity_tolerance": diagnostics.linearity.tolerance,
            "min_probe_samples": estimators.MIN_PROBE_SAMPLES,
            "min_bin_count": estimators.MIN_BIN_COUNT,
            "min_members": MIN_MEMBERS,
            "bins": str(bin_spec),
        },
    }
    return FalsificationReport(
        source or _source(series), lags, window_steps, significance, diagnostics, fits,
        profile, white_noise, verdict,
        narrative(diagnostics.verdicts, verdict, ens.member_count, window_steps, lags),
        metadata)
