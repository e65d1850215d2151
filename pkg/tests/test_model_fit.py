"""
Contains tests for ARCH(1) and GARCH(1,1) fitting and the closed-form
unconditional mean square fluctuations.
"""

import math
from collections import namedtuple

import numpy as np
import pytest

from pyincrements.errors import (DomainError, OptimizationError, SingularityError, SizeError,
                                 UsageError)
from pyincrements.generators import ArchParams, GarchParams, WienerParams, gen_arch1, \
    gen_garch11, gen_wiener
from pyincrements.model_fit import (ARCH1, GARCH11, OLS_NOTE, OptimizerConfig, fit_arch1,
                                    fit_arch1_by_lag, fit_garch11, garch_nll,
                                    unconditional_msf_arch1, unconditional_msf_garch11)
from pyincrements.series_core import IncrementSeries, increments


def incs_of(values):
    return IncrementSeries(1, np.arange(1, len(values) + 1), values)


@pytest.fixture(scope="module")
def garch_data():
    return increments(gen_garch11(GarchParams(0.1, 0.2, 0.7), 10 ** 5, seed=31), 1)


@pytest.fixture(scope="module")
def arch_data():
    return increments(gen_arch1(ArchParams(0.2, 0.5), 20000, seed=32), 1)


class TestFitArch(object):

    def test_recovery(self):
        """
        Tests parameter recovery at moderate memory.
        """
        fit = fit_arch1(increments(gen_arch1(ArchParams(0.2, 0.25), 10 ** 5, seed=33), 1))
        assert ARCH1 == fit.model
        assert fit.estimates["alpha"] == pytest.approx(0.2, abs=0.02)
        assert fit.estimates["omega"] == pytest.approx(0.25, abs=0.05)
        assert fit.converged
        assert isinstance(fit.params, ArchParams)

    def test_recovery_strong_memory(self):
        """
        Tests recovery at omega = 0.5, where squared increments are
        heavy-tailed and least squares converges slowly.
        """
        fit = fit_arch1(increments(gen_arch1(ArchParams(0.2, 0.5), 10 ** 5, seed=34), 1))
        assert fit.estimates["alpha"] == pytest.approx(0.2, abs=0.05)
        assert fit.estimates["omega"] == pytest.approx(0.5, abs=0.15)

    def test_wiener_has_no_memory(self):
        """
        Tests that Wiener data gives omega within 3 standard errors of 0.
        """
        fit = fit_arch1(increments(gen_wiener(WienerParams(1.0), 10 ** 5, seed=35), 1))
        assert abs(fit.estimates["omega"]) < 3 * fit.stderrs["omega"]
        assert fit.estimates["alpha"] == pytest.approx(1.0, abs=0.05)

    def test_standard_error_note(self):
        """
        Tests that ARCH(1) fits carry the warning about their OLS standard errors.
        """
        fit = fit_arch1(increments(gen_arch1(ArchParams(0.2, 0.5), 2000, seed=34), 1))
        assert (OLS_NOTE,) == fit.notes

    def test_singular(self):
        """
        Tests that constant-magnitude increments are singular.
        """
        values = np.array([1.0, -1.0] * 30)
        with pytest.raises(SingularityError):
            fit_arch1(incs_of(values))

    def test_too_few(self):
        """
        Tests that at least 50 increments are required.
        """
        with pytest.raises(SizeError):
            fit_arch1(incs_of(np.arange(49.0)))

    def test_overlapping(self):
        """
        Tests that overlapping increments are refused.
        """
        levels = gen_wiener(WienerParams(), 500, seed=1)
        with pytest.raises(UsageError):
            fit_arch1(increments(levels, 2, overlapping=True))

    def test_by_lag(self):
        """
        Tests that fits are made per lag on non-overlapping increments.
        """
        levels = gen_wiener(WienerParams(), 20000, seed=36)
        fits = fit_arch1_by_lag(levels, (1, 2, 4))
        assert [1, 2, 4] == list(fits)
        for lag, fit in fits.items():
            assert lag == fit.lag_steps
            assert 20000 // lag == fit.sample_count
            assert fit.unconditional_msf == pytest.approx(lag, rel=0.15)


class TestFitGarch(object):

    def test_recovery(self, garch_data):
        """
        Tests parameter recovery on 10**5 GARCH(1,1) increments.
        """
        fit = fit_garch11(garch_data)
        assert GARCH11 == fit.model
        assert fit.estimates["alpha"] == pytest.approx(0.1, abs=0.05)
        assert fit.estimates["omega"] == pytest.approx(0.2, abs=0.05)
        assert fit.estimates["zeta"] == pytest.approx(0.7, abs=0.05)
        assert isinstance(fit.params, GarchParams)
        assert all(math.isfinite(se) and se > 0 for se in fit.stderrs.values())
        assert fit.notes

    def test_nested_arch(self, arch_data):
        """
        Tests that ARCH data gives zeta near 0 and a quasi-likelihood at
        least as good as the true nested parameters.
        """
        fit = fit_garch11(arch_data)
        assert abs(fit.estimates["zeta"]) < 0.1
        assert fit.loss <= garch_nll((0.2, 0.5, 0.0), arch_data.values) + 1e-6

    def test_zero_iterations(self, arch_data):
        """
        Tests that a zero iteration limit returns the best start, unconverged.
        """
        fit = fit_garch11(arch_data, OptimizerConfig(max_iterations=0))
        assert not fit.converged
        assert 0 == fit.iterations
        estimates = fit.estimates
        assert fit.loss == garch_nll((estimates["alpha"], estimates["omega"],
                                      estimates["zeta"]), arch_data.values)

    def test_deterministic(self, arch_data):
        """
        Tests that fits are bit-reproducible.
        """
        config = OptimizerConfig(starts=2, max_iterations=200)
        a = fit_garch11(arch_data, config)
        b = fit_garch11(arch_data, config)
        assert a.estimates == b.estimates
        assert a.loss == b.loss

    def test_more_starts_than_table(self, arch_data):
        """
        Tests that extra starts are generated deterministically.
        """
        fit = fit_garch11(arch_data, OptimizerConfig(starts=11, max_iterations=0))
        assert math.isfinite(fit.loss)

    def test_all_starts_fail(self):
        """
        Tests that an optimization error is raised when no start is finite.
        """
        values = np.full(600, 1e200)
        values[::2] *= -1
        with pytest.raises(OptimizationError) as info:
            fit_garch11(incs_of(values), OptimizerConfig(max_iterations=0))
        assert info.value.best_params is None

    def test_too_few(self):
        """
        Tests that at least 500 increments are required.
        """
        with pytest.raises(SizeError):
            fit_garch11(incs_of(np.random.default_rng(1).standard_normal(499)))

    def test_bad_config(self):
        """
        Tests optimizer configuration validation.
        """
        with pytest.raises(UsageError):
            OptimizerConfig(starts=0)
        with pytest.raises(UsageError):
            OptimizerConfig(max_iterations=-1)
        with pytest.raises(UsageError):
            OptimizerConfig(tolerance=0.0)


class TestGarchLikelihood(object):

    def test_zeta_zero_matches_arch_form(self):
        """
        Tests the likelihood against a direct ARCH(1) evaluation.
        """
        z = np.random.default_rng(2).standard_normal(100)
        alpha, omega = 0.3, 0.4
        v = np.empty(100)
        v[0] = np.mean(z ** 2)
        v[1:] = alpha + omega * z[:-1] ** 2
        expected = 0.5 * np.mean(np.log(2 * math.pi * v) + z ** 2 / v)
        assert garch_nll((alpha, omega, 0.0), z) == pytest.approx(expected, rel=1e-12)
        assert garch_nll(ArchParams(alpha, omega), z) == pytest.approx(expected, rel=1e-12)

    def test_recursion(self):
        """
        Tests the variance recursion against an explicit loop.
        """
        z = np.random.default_rng(3).standard_normal(50)
        alpha, omega, zeta = 0.1, 0.2, 0.7
        v = [1.5]
        for k in range(1, 50):
            v.append(alpha + omega * z[k - 1] ** 2 + zeta * v[-1])
        v = np.array(v)
        expected = 0.5 * np.mean(np.log(2 * math.pi * v) + z ** 2 / v)
        assert garch_nll(GarchParams(alpha, omega, zeta), z, backcast=1.5) == \
            pytest.approx(expected, rel=1e-10)

    def test_non_positive_variance(self):
        """
        Tests that a non-positive variance gives an infinite objective.
        """
        assert math.isinf(garch_nll((-1.0, 0.0, 0.0), np.ones(10)))


class TestUnconditionalMsf(object):

    def test_arch(self):
        """
        Tests alpha / (1 - omega).
        """
        assert unconditional_msf_arch1(ArchParams(0.2, 0.5)) == pytest.approx(0.4)
        assert 0.3 == unconditional_msf_arch1(ArchParams(0.3, 0.0))

    def test_garch(self):
        """
        Tests alpha / (1 - omega - zeta) and its ARCH limit.
        """
        assert unconditional_msf_garch11(GarchParams(0.1, 0.2, 0.7)) == pytest.approx(1.0)
        assert unconditional_msf_garch11(GarchParams(0.2, 0.5, 0.0)) == \
            unconditional_msf_arch1(ArchParams(0.2, 0.5))

    def test_domain(self):
        """
        Tests that no fixed point exists at or beyond persistence 1.
        """
        raw_arch = namedtuple("RawArch", "alpha omega")
        raw_garch = namedtuple("RawGarch", "alpha omega zeta")
        with pytest.raises(DomainError):
            unconditional_msf_arch1(raw_arch(0.1, 1.0))
        with pytest.raises(DomainError):
            unconditional_msf_garch11(raw_garch(0.1, 0.6, 0.4))

    def test_increasing(self):
        """
        Tests that the fixed points increase in every parameter.
        """
        base = unconditional_msf_garch11(GarchParams(0.1, 0.2, 0.5))
        assert unconditional_msf_garch11(GarchParams(0.2, 0.2, 0.5)) > base
        assert unconditional_msf_garch11(GarchParams(0.1, 0.3, 0.5)) > base
        assert unconditional_msf_garch11(GarchParams(0.1, 0.2, 0.6)) > base
        assert unconditional_msf_arch1(ArchParams(0.1, 0.3)) > unconditional_msf_arch1(
            ArchParams(0.1, 0.2))
