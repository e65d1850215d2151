"""
Fitting ARCH(1) and GARCH(1,1) to increment data, and the closed-form
unconditional mean square fluctuations those models imply.

ARCH(1) is fitted by ordinary least squares of ``z**2(t)`` on
``z**2(t-T)``, the sample version of its defining regression.
GARCH(1,1) maximizes the Gaussian quasi-likelihood with a multi-start
Nelder-Mead search over an unconstrained reparameterization:

    alpha = exp(a),  omega = p * s,  zeta = p * (1 - s)
    p = expit(b),    s = expit(c)

which keeps ``alpha > 0``, ``omega, zeta >= 0`` and ``omega + zeta < 1``.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter
from scipy.special import expit, logit
from scipy.stats import linregress

from .errors import DomainError, OptimizationError, SingularityError, SizeError, UsageError
from .generators import ArchParams, GarchParams
from .series_core import increments

log = logging.getLogger(__name__)

ARCH1 = "arch1"
GARCH11 = "garch11"

MIN_ARCH_INCREMENTS = 50
MIN_GARCH_INCREMENTS = 500

QML_NOTE = ("Gaussian quasi-likelihood; innovations of another distribution make this a "
            "misspecified likelihood and the standard errors approximate")
OLS_NOTE = ("OLS standard errors assume constant residual variance, which ARCH data lacks; "
            "they understate the spread of the estimates")

# (persistence omega + zeta, share omega / (omega + zeta)) per start
_STARTS = ((0.9, 0.1), (0.95, 0.05), (0.6, 0.5), (0.5, 0.95), (0.8, 0.25),
           (0.98, 0.02), (0.3, 0.7), (0.7, 0.9))

# exp() overflows above this
_MAX_LOG_ALPHA = 700.0


@dataclass(frozen=True)
class OptimizerConfig(object):
    """Budget and stopping rule for the GARCH quasi-likelihood search."""
    starts: int = 5
    max_iterations: int = 2000
    tolerance: float = 1e-8

    def __post_init__(self):
        if int(self.starts) != self.starts or self.starts < 1:
            raise UsageError("starts must be a positive integer, got %r" % (self.starts,))
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 0:
            raise UsageError("max_iterations must be a non-negative integer, got %r"
                             % (self.max_iterations,))
        if not self.tolerance > 0:
            raise UsageError("tolerance must be positive, got %r" % (self.tolerance,))


@dataclass(frozen=True, eq=False)
class FitResult(object):
    """
    Estimated parameters of one model at one lag. ``estimates`` and
    ``stderrs`` map parameter names to values in model order; ``loss``
    is the mean squared residual (ARCH) or the mean negative
    log-likelihood per observation (GARCH).
    """
    model: str
    estimates: dict
    stderrs: dict
    loss: float
    iterations: int
    converged: bool
    sample_count: int
    lag_steps: int
    notes: tuple = field(default=())

    @property
    def params(self):
        """The estimates as a validated parameter record; may raise ``ParameterError``."""
        if self.model == ARCH1:
            return ArchParams(**self.estimates)
        return GarchParams(**self.estimates)

    @property
    def persistence(self):
        return self.estimates["omega"] + self.estimates.get("zeta", 0.0)

    @property
    def unconditional_msf(self):
        """``alpha / (1 - omega - zeta)`` from the raw estimates, NaN where undefined."""
        persistence = self.persistence
        if not abs(persistence) < 1:
            return math.nan
        return self.estimates["alpha"] / (1.0 - persistence)


def unconditional_msf_arch1(params):
    """Returns ``alpha / (1 - omega)``, the stationary mean square fluctuation of ARCH(1)."""
    if not abs(params.omega) < 1:
        raise DomainError("ARCH(1) has no finite fixed point for |omega| >= 1, got %r"
                          % params.omega)
    return params.alpha / (1.0 - params.omega)


def unconditional_msf_garch11(params):
    """
    Returns ``alpha / (1 - omega - zeta)``, the fixed point of the expected
    GARCH(1,1) recursion.
    """
    if not params.omega + params.zeta < 1:
        raise DomainError("GARCH(1,1) has no finite fixed point for omega + zeta >= 1, got %r"
                          % (params.omega + params.zeta))
    return params.alpha / (1.0 - params.omega - params.zeta)


def _check_increments(incs, minimum, what):
    if incs.overlapping:
        raise UsageError("%s fits need non-overlapping increments" % what)
    if len(incs) < minimum:
        raise SizeError("%s fits need at least %d increments, got %d" % (what, minimum, len(incs)))


def fit_arch1(incs):
    """
    Fits ARCH(1) to non-overlapping increments by regressing each
    squared increment on the previous one: the intercept estimates
    ``alpha`` and the slope ``omega``. Standard errors are the usual
    OLS ones, which are too small under conditional heteroscedasticity
    (see ``OLS_NOTE``). Raises :py:class:`SingularityError` when all squared
    increments are equal.
    """
    _check_increments(incs, MIN_ARCH_INCREMENTS, "ARCH(1)")
    sq = incs.values * incs.values
    x, y = sq[:-1], sq[1:]
    if np.ptp(x) == 0:
        raise SingularityError("squared increments are all equal; the regression is singular")

    res = linregress(x, y)
    resid = y - (res.intercept + res.slope * x)
    log.debug("ARCH(1) T=%d alpha=%.4g omega=%.4g", incs.lag_steps, res.intercept, res.slope)
    return FitResult(ARCH1,
                     {"alpha": float(res.intercept), "omega": float(res.slope)},
                     {"alpha": float(res.intercept_stderr), "omega": float(res.stderr)},
                     float(np.mean(resid * resid)), 0, True, len(incs), incs.lag_steps,
                     notes=(OLS_NOTE,))


def fit_arch1_by_lag(levels, lags):
    """Fits ARCH(1) separately on the non-overlapping increments at each lag."""
    return {int(lag): fit_arch1(increments(levels, lag, overlapping=False)) for lag in lags}


def garch_nll(params, values, backcast=None):
    """
    Mean Gaussian negative log-likelihood of ``values`` under the
    GARCH(1,1) recursion, with the first conditional mean square
    fluctuation set to ``backcast`` (default: the sample mean square).
    ``params`` is a ``GarchParams`` or an ``(alpha, omega, zeta)``
    triple; a non-positive variance anywhere gives ``inf``.
    """
    if isinstance(params, (GarchParams, ArchParams)):
        alpha, omega = params.alpha, params.omega
        zeta = getattr(params, "zeta", 0.0)
    else:
        alpha, omega, zeta = params
    sq = np.asarray(values, dtype=float) ** 2
    v0 = float(np.mean(sq)) if backcast is None else backcast

    drive = alpha + omega * sq[:-1]
    rest, _ = lfilter([1.0], [1.0, -zeta], drive, zi=[zeta * v0])
    v = np.concatenate([[v0], rest])
    if not np.all(v > 0) or not np.all(np.isfinite(v)):
        return math.inf
    return 0.5 * float(np.mean(np.log(2.0 * math.pi * v) + sq / v))


def _natural(theta):
    p = expit(theta[1])
    s = expit(theta[2])
    return math.exp(min(theta[0], _MAX_LOG_ALPHA)), p * s, p * (1.0 - s)


def _start_points(mean_square, count):
    points = list(_STARTS)
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    i = 0
    while len(points) < count:
        i += 1
        points.append((0.5 + 0.45 * ((i * golden) % 1.0),
                       min(max((i * golden * golden) % 1.0, 0.05), 0.95)))
    return [np.array([math.log(mean_square * (1.0 - p)), logit(p), logit(s)])
            for p, s in points[:count]]


def _hessian(func, x):
    """Central-difference Hessian of ``func`` at ``x``."""
    x = np.asarray(x, dtype=float)
    h = 1e-4 * np.maximum(np.abs(x), 1e-2)
    dim = len(x)
    hess = np.empty((dim, dim))
    f0 = func(x)
    for i in range(dim):
        ei = np.zeros(dim)
        ei[i] = h[i]
        hess[i, i] = (func(x + ei) - 2.0 * f0 + func(x - ei)) / h[i] ** 2
        for j in range(i):
            ej = np.zeros(dim)
            ej[j] = h[j]
            hess[i, j] = hess[j, i] = (func(x + ei + ej) - func(x + ei - ej)
                                       - func(x - ei + ej) + func(x - ei - ej)) / (4 * h[i] * h[j])
    return hess


def _stderrs(values, natural):
    count = len(values)

    def total(p):
        return count * garch_nll(tuple(p), values)

    try:
        cov = np.linalg.inv(_hessian(total, natural))
        diag = np.diag(cov)
    except np.linalg.LinAlgError:
        diag = np.full(3, np.nan)
    return [math.sqrt(d) if d > 0 else math.nan for d in diag]


def fit_garch11(incs, optimizer_config=None):
    """
    Fits GARCH(1,1) by maximizing the Gaussian quasi-likelihood with a
    Nelder-Mead search from ``optimizer_config.starts`` deterministic
    starting points. The best start wins, ties going to the lowest start
    index. ``converged`` is false when the winning search ran out of
    iterations before the objective settled within the tolerance.

    With ``max_iterations = 0`` the starting points are only evaluated.
    Raises :py:class:`OptimizationError` if no start yields a finite
    objective.
    """
    config = optimizer_config or OptimizerConfig()
    _check_increments(incs, MIN_GARCH_INCREMENTS, "GARCH(1,1)")
    values = incs.values
    mean_square = float(np.mean(values * values))
    if not mean_square > 0:
        raise SingularityError("increments are all zero")

    def objective(theta):
        return garch_nll(_natural(theta), values)

    outcomes = []
    for index, theta0 in enumerate(_start_points(mean_square, config.starts)):
        if config.max_iterations == 0:
            outcomes.append((objective(theta0), index, theta0, 0, False))
            continue
        res = minimize(objective, theta0, method="Nelder-Mead",
                       options={"maxiter": config.max_iterations,
                                "fatol": config.tolerance, "xatol": 1e-6})
        log.debug("GARCH start %d: nll=%.10g after %d iterations (%s)",
                  index, res.fun, res.nit, "converged" if res.success else res.message)
        outcomes.append((float(res.fun), index, res.x, int(res.nit), bool(res.success)))

    finite = [o for o in outcomes if np.isfinite(o[0])]
    if not finite:
        raise OptimizationError("no GARCH(1,1) start reached a finite quasi-likelihood",
                                best_params=None)
    loss, index, theta, iterations, converged = min(finite, key=lambda o: (o[0], o[1]))
    alpha, omega, zeta = _natural(theta)
    se = _stderrs(values, (alpha, omega, zeta))
    log.info("GARCH(1,1) T=%d alpha=%.4g omega=%.4g zeta=%.4g (start %d)",
             incs.lag_steps, alpha, omega, zeta, index)
    return FitResult(GARCH11,
                     {"alpha": alpha, "omega": omega, "zeta": zeta},
                     {"alpha": se[0], "omega": se[1], "zeta": se[2]},
                     loss, iterations, converged, len(incs), incs.lag_steps,
                     notes=(QML_NOTE,))
