"""
Seeded Monte-Carlo simulators for the process families the diagnostics
reason about: the Wiener process, ARCH(1), GARCH(1,1), fractional
Brownian motion and a scaled Wiener process with independent but
nonstationary increments.

Every generator produces levels as the cumulative sum of its
increments, so ``x(0) = 0`` and a request for ``n`` steps yields
``n + 1`` samples. Randomness comes from a counter-based Philox stream
keyed by ``(seed, member)``; member ``m`` of an ensemble draws exactly
what ``gen_*(..., member=m)`` draws, so ensembles can be produced in
any order or in parallel with identical results.
"""

import logging
import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, ParameterError, ResourceError, SizeError, UsageError
from .series_core import Ensemble, LevelSeries

log = logging.getLogger(__name__)

DEFAULT_SEED = 42
"""Seed used whenever none is given, so default runs are reproducible."""

FBM_MAX_STEPS = 2 ** 16
"""Largest fBm path the exact Durbin-Levinson recursion will attempt."""


def _require(condition, field, message):
    if not condition:
        raise ParameterError(field, message)


def _positive(value, field):
    _require(np.isfinite(value) and value > 0, field, "must be a positive number, got %r" % value)


def _hurst(value):
    _require(np.isfinite(value) and 0 < value < 1, "hurst", "must lie in (0, 1), got %r" % value)


@dataclass(frozen=True)
class WienerParams(object):
    """Driftless Wiener process with variance rate ``sigma1_sq`` per unit time."""
    sigma1_sq: float = 1.0

    model = "wiener"

    def __post_init__(self):
        _positive(self.sigma1_sq, "sigma1_sq")


@dataclass(frozen=True)
class ArchParams(object):
    """
    ARCH(1): conditional mean square fluctuation ``alpha + omega * e**2``
    of the next increment given the last one.
    """
    alpha: float
    omega: float

    model = "arch1"

    def __post_init__(self):
        _positive(self.alpha, "alpha")
        _require(np.isfinite(self.omega) and abs(self.omega) < 1, "omega",
                 "must satisfy |omega| < 1, got %r" % self.omega)


@dataclass(frozen=True)
class GarchParams(object):
    """
    GARCH(1,1): ``v[k] = alpha + omega * e[k-1]**2 + zeta * v[k-1]``.
    """
    alpha: float
    omega: float
    zeta: float

    model = "garch11"

    def __post_init__(self):
        _positive(self.alpha, "alpha")
        _require(np.isfinite(self.omega) and self.omega >= 0, "omega",
                 "must be non-negative, got %r" % self.omega)
        _require(np.isfinite(self.zeta) and self.zeta >= 0, "zeta",
                 "must be non-negative, got %r" % self.zeta)
        _require(self.omega + self.zeta < 1, "omega",
                 "omega + zeta must be below 1, got %r" % (self.omega + self.zeta))


@dataclass(frozen=True)
class FbmParams(object):
    """Fractional Brownian motion with ``<x(t)**2> = sigma_sq * t**(2 * hurst)``."""
    hurst: float
    sigma_sq: float = 1.0

    model = "fbm"

    def __post_init__(self):
        _hurst(self.hurst)
        _positive(self.sigma_sq, "sigma_sq")


@dataclass(frozen=True)
class ScaledWienerParams(object):
    """
    Independent Gaussian increments whose variances telescope to
    ``sigma_sq * t**(2 * hurst)``: uncorrelated, but stationary only at
    ``hurst = 0.5``.
    """
    hurst: float
    sigma_sq: float = 1.0

    model = "scaled-wiener"

    def __post_init__(self):
        _hurst(self.hurst)
        _positive(self.sigma_sq, "sigma_sq")


def params_dict(params):
    """Returns the parameters as an ordered ``{"model": ..., field: value}`` mapping."""
    out = {"model": params.model}
    out.update(asdict(params))
    return out


class Noise(Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"
    RADEMACHER = "rademacher"


_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class NoiseSpec(object):
    """
    Distribution of the standardized innovations ``z`` (mean 0,
    variance 1). ``uniform`` is rescaled to ``[-sqrt(3), sqrt(3)]``.
    """
    distribution: Noise = Noise.GAUSSIAN

    def __post_init__(self):
        try:
            object.__setattr__(self, "distribution", Noise(self.distribution))
        except ValueError:
            raise UsageError("unknown noise distribution %r, choose from %s"
                             % (self.distribution, ", ".join(n.value for n in Noise)))

    def draw(self, rng, size):
        if self.distribution is Noise.GAUSSIAN:
            return rng.standard_normal(size)
        if self.distribution is Noise.UNIFORM:
            return rng.uniform(-_SQRT3, _SQRT3, size)
        return rng.integers(0, 2, size).astype(float) * 2.0 - 1.0


GAUSSIAN = NoiseSpec()


def substream(seed, member=0):
    """
    Returns the random generator for ensemble member ``member`` under
    master seed ``seed``. Streams for different members are
    independent and do not depend on the order they are created in.
    """
    if int(seed) != seed or seed < 0:
        raise UsageError("seed must be a non-negative integer, got %r" % (seed,))
    if int(member) != member or member < 0:
        raise UsageError("member must be a non-negative integer, got %r" % (member,))
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(member),))
    return np.random.Generator(np.random.Philox(sequence))


def _check_steps(n):
    if int(n) != n or n < 2:
        raise SizeError("a path needs at least 2 steps, got %r" % (n,))
    return int(n)


def _levels_from_increments(incs):
    """Cumulative sums along each row, prefixed with x(0) = 0."""
    levels = np.zeros((incs.shape[0], incs.shape[1] + 1))
    np.cumsum(incs, axis=1, out=levels[:, 1:])
    return levels


def _wiener_increments(params, z, step):
    return math.sqrt(params.sigma1_sq * step) * z


def _scaled_wiener_increments(params, z, step):
    times = step * np.arange(z.shape[1] + 1)
    powered = times ** (2.0 * params.hurst)
    return np.sqrt(params.sigma_sq * np.diff(powered)) * z


def _conditional_msf_recursion(z, alpha, omega, zeta):
    """
    Runs ``v[k] = alpha + omega * e[k-1]**2 + zeta * v[k-1]``,
    ``e[k] = z[k] * sqrt(v[k])`` along each row of ``z``, starting from
    the fixed point ``v[0] = alpha / (1 - omega - zeta)``.

    A single row is iterated with Python floats and several rows with
    numpy vectors; both evaluate the same IEEE operations in the same
    order and agree bit for bit.
    """
    paths, steps = z.shape
    v0 = alpha / (1.0 - omega - zeta)

    if paths == 1:
        out = []
        v = v0
        prev = 0.0
        for k, zk in enumerate(z[0].tolist()):
            if k:
                v = alpha + omega * (prev * prev) + zeta * v
            if not v > 0.0:
                raise DomainError("conditional mean square fluctuation %r <= 0 at step %d"
                                  % (v, k))
            prev = zk * math.sqrt(v)
            out.append(prev)
        return np.array([out])

    e = np.empty_like(z)
    v = np.full(paths, v0)
    prev = None
    for k in range(steps):
        if k:
            v = alpha + omega * (prev * prev) + zeta * v
        if not np.all(v > 0.0):
            raise DomainError("conditional mean square fluctuation <= 0 at step %d" % k)
        prev = z[:, k] * np.sqrt(v)
        e[:, k] = prev
    return e


def _arch_increments(params, z, step):
    return _conditional_msf_recursion(z, params.alpha, params.omega, 0.0)


def _garch_increments(params, z, step):
    return _conditional_msf_recursion(z, params.alpha, params.omega, params.zeta)


def _fgn_autocovariance(n, hurst):
    """
    Autocovariance of unit fractional Gaussian noise,
    ``g(k) = (|k+1|**2H - 2|k|**2H + |k-1|**2H) / 2``.
    """
    k = np.arange(n, dtype=float)
    two_h = 2.0 * hurst
    return 0.5 * (np.abs(k + 1) ** two_h - 2.0 * k ** two_h + np.abs(k - 1) ** two_h)


def _fbm_increments(params, z, step):
    """
    Exact fractional Gaussian noise by the Durbin-Levinson recursion.

    Sample ``k`` is its best linear prediction from the samples before it
    plus ``sqrt(v[k]) * z[k]``, i.e. the Cholesky factor of the covariance
    applied one row at a time. The prediction coefficients are shared by
    all paths: O(n**2) time, O(n) memory per path.
    """
    paths, n = z.shape
    gamma = _fgn_autocovariance(n, params.hurst)
    x = np.empty_like(z)
    x[:, 0] = z[:, 0]
    phi = np.zeros(n)
    v = gamma[0]
    for k in range(1, n):
        prev = phi[:k - 1]
        reflection = (gamma[k] - prev @ gamma[k - 1:0:-1]) / v
        phi[:k - 1] = prev - reflection * prev[::-1]
        phi[k - 1] = reflection
        v *= 1.0 - reflection * reflection
        if not v > 0.0:
            raise DomainError("fBm prediction variance collapsed at step %d" % k)
        x[:, k] = x[:, k - 1::-1] @ phi[:k] + math.sqrt(v) * z[:, k]
    scale = math.sqrt(params.sigma_sq) * step ** params.hurst
    return scale * x


_KERNELS = {
    WienerParams: (_wiener_increments, False),
    ArchParams: (_arch_increments, True),
    GarchParams: (_garch_increments, True),
    FbmParams: (_fbm_increments, False),
    ScaledWienerParams: (_scaled_wiener_increments, False),
}

MODELS = {cls.model: cls for cls in _KERNELS}
"""Parameter classes by model name."""


def _simulate(params, members, n, step, seed, noise, max_steps=FBM_MAX_STEPS):
    n = _check_steps(n)
    if not (np.isfinite(step) and step > 0):
        raise SizeError("step must be positive, got %r" % (step,))
    try:
        kernel, noisy = _KERNELS[type(params)]
    except KeyError:
        raise UsageError("no generator for %r" % (params,))
    if isinstance(params, FbmParams) and n > max_steps:
        raise ResourceError("fBm generation is O(n**2) in time; %d steps exceeds the "
                            "maximum of %d" % (n, max_steps))

    noise = noise if (noisy and noise is not None) else GAUSSIAN
    try:
        z = np.vstack([noise.draw(substream(seed, m), n) for m in members])
        return _levels_from_increments(kernel(params, z, float(step)))
    except MemoryError:
        raise ResourceError("not enough memory for %d paths of %d steps" % (len(members), n))


def _single(params, n, step, seed, noise, member, **kwargs):
    levels = _simulate(params, [member], n, step, seed, noise, **kwargs)
    return LevelSeries(levels[0], step=step, detrended=True)


def gen_wiener(params, n, step=1.0, seed=DEFAULT_SEED, member=0):
    """
    Wiener path: independent Gaussian increments of variance
    ``sigma1_sq * step``.
    """
    return _single(params, n, step, seed, None, member)


def gen_arch1(params, n, seed=DEFAULT_SEED, noise=GAUSSIAN, member=0, step=1.0):
    """
    ARCH(1) path: ``e[k] = z[k] * sqrt(alpha + omega * e[k-1]**2)`` with
    ``e[0]`` drawn at the stationary scale ``sqrt(alpha / (1 - omega))``.

    Negative ``omega`` is accepted as long as the conditional mean square
    fluctuation stays positive; a :py:class:`DomainError` is raised the
    moment it does not.
    """
    return _single(params, n, step, seed, noise, member)


def gen_garch11(params, n, seed=DEFAULT_SEED, noise=GAUSSIAN, member=0, step=1.0):
    """
    GARCH(1,1) path started at ``v[0] = alpha / (1 - omega - zeta)``.
    With ``zeta = 0`` the output is bit-identical to :py:func:`gen_arch1`.
    """
    return _single(params, n, step, seed, noise, member)


def gen_fbm(params, n, step=1.0, seed=DEFAULT_SEED, member=0, max_steps=FBM_MAX_STEPS):
    """
    Fractional Brownian motion by exact factorization of the
    fractional Gaussian noise covariance, with
    ``<x(s) x(t)> = sigma_sq / 2 * (s**2H + t**2H - |t - s|**2H)``.
    Raises :py:class:`ResourceError` above ``max_steps``.
    """
    return _single(params, n, step, seed, None, member, max_steps=max_steps)


def gen_scaled_wiener(params, n, step=1.0, seed=DEFAULT_SEED, member=0):
    """
    Independent Gaussian increments with variance
    ``sigma_sq * (t[k]**2H - t[k-1]**2H)``.
    """
    return _single(params, n, step, seed, None, member)


def gen_ensemble(params, members, n, step=1.0, seed=DEFAULT_SEED, noise=GAUSSIAN,
                 max_steps=FBM_MAX_STEPS):
    """
    Generates ``members`` independent paths of the model ``params``
    belongs to. Member ``m`` uses the substream ``(seed, m)``.
    """
    if int(members) != members or members < 1:
        raise SizeError("an ensemble needs at least one member, got %r" % (members,))
    log.debug("generating %d %s paths of %d steps", members, params.model, n)
    paths = _simulate(params, range(int(members)), n, step, seed, noise, max_steps=max_steps)
    return Ensemble(paths, step=step, origin="generated")
