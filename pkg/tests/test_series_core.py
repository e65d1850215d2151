"""
Contains tests for the series types and the transformations between
them.
"""

import math

import numpy as np
import pytest

from pyincrements.errors import DomainError, FormatError, SizeError, UsageError
from pyincrements.series_core import (Ensemble, IncrementSeries, LevelSeries, PriceSeries,
                                      check_grid, detrend, ensemble_split, increments,
                                      log_returns, rebase)


def levels(values, **kwargs):
    return LevelSeries(values, **kwargs)


class TestPriceSeries(object):

    def test_valid(self):
        """
        Tests that a valid price series infers its step.
        """
        prices = PriceSeries([0.0, 2.0, 4.0], [1.0, 2.0, 3.0])
        assert 3 == len(prices)
        assert 2.0 == prices.step

    def test_too_short(self):
        """
        Tests that a single price is rejected.
        """
        with pytest.raises(SizeError):
            PriceSeries([0.0], [1.0])

    def test_non_positive_price(self):
        """
        Tests that non-positive prices raise an error naming the index.
        """
        with pytest.raises(DomainError) as info:
            PriceSeries([0.0, 1.0, 2.0], [1.0, 0.0, 2.0])
        assert "index 1" in str(info.value)

    def test_non_increasing_timestamps(self):
        """
        Tests that timestamps must strictly increase.
        """
        with pytest.raises(FormatError):
            PriceSeries([0.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_immutable(self):
        """
        Tests that the stored arrays cannot be written to.
        """
        prices = PriceSeries([0.0, 1.0], [1.0, 2.0])
        with pytest.raises(ValueError):
            prices.prices[0] = 5.0


class TestLogReturns(object):

    def test_constant_price(self):
        """
        Tests that a constant price gives zero log-returns.
        """
        out = log_returns(PriceSeries([0, 1, 2], [100.0, 100.0, 100.0]))
        assert [0.0, 0.0, 0.0] == list(out.values)
        assert not out.detrended

    def test_exponential_ladder(self):
        """
        Tests that an exponential price ladder gives integer levels.
        """
        out = log_returns(PriceSeries([0, 1, 2], [100.0, 100.0 * math.e, 100.0 * math.e ** 2]))
        assert np.allclose([0.0, 1.0, 2.0], out.values, atol=1e-12)

    def test_known_values(self):
        """
        Tests log-returns against precomputed logarithms.
        """
        out = log_returns(PriceSeries([0, 1, 2], [100.0, 105.0, 103.0]))
        assert np.allclose([0.0, 0.048790, 0.029559], out.values, atol=1e-6)

    def test_explicit_reference(self):
        """
        Tests that an explicit reference still starts the levels at 0.
        """
        out = log_returns(PriceSeries([0, 1], [100.0, 200.0]), reference=50.0)
        assert 0.0 == out.values[0]
        assert math.log(2.0) == pytest.approx(out.values[1])

    def test_bad_reference(self):
        """
        Tests that references must be positive numbers.
        """
        prices = PriceSeries([0, 1], [100.0, 200.0])
        with pytest.raises(DomainError):
            log_returns(prices, reference=-1.0)
        with pytest.raises(UsageError):
            log_returns(prices, reference="last")

    def test_irregular_timestamps(self):
        """
        Tests that timestamps off the grid by more than the tolerance fail.
        """
        with pytest.raises(FormatError):
            log_returns(PriceSeries([0.0, 1.0, 2.5, 3.0], [1.0, 1.0, 1.0, 1.0]))

    def test_jitter_within_tolerance(self):
        """
        Tests that small timestamp jitter is accepted.
        """
        check_grid([0.0, 1.05, 1.96, 3.0], 1.0)


class TestDetrend(object):

    def test_linear_trend(self):
        """
        Tests that a pure trend is removed completely.
        """
        assert [0.0, 0.0, 0.0, 0.0] == list(detrend(levels([0, 1, 2, 3])).values)

    def test_driftless(self):
        """
        Tests that driftless input is unchanged.
        """
        assert [0.0, 0.0, 0.0] == list(detrend(levels([0, 0, 0])).values)

    def test_known_values(self):
        """
        Tests subtraction of the endpoint drift.
        """
        out = detrend(levels([0, 2, 1, 3]))
        assert [0.0, 1.0, -1.0, 0.0] == list(out.values)
        assert out.detrended

    def test_offset_start(self):
        """
        Tests that a series not starting at 0 is rebased before the drift
        is removed.
        """
        out = detrend(levels([7, 9, 8, 10]))
        assert [0.0, 1.0, -1.0, 0.0] == list(out.values)

    def test_endpoints_and_mean_increment(self):
        """
        Tests that the output starts and ends at 0.
        """
        rng = np.random.default_rng(3)
        out = detrend(levels(np.cumsum(rng.standard_normal(101)) + 5.0))
        assert 0.0 == out.values[0]
        assert 0.0 == out.values[-1]
        assert np.diff(out.values).sum() == pytest.approx(0.0, abs=1e-12)

    def test_idempotent(self):
        """
        Tests that detrending twice is the same as detrending once.
        """
        rng = np.random.default_rng(4)
        once = detrend(levels(np.cumsum(rng.standard_normal(50))))
        twice = detrend(once)
        assert np.array_equal(once.values, twice.values)


class TestIncrements(object):

    def test_successive_differences(self):
        """
        Tests overlapping increments at lag 1.
        """
        out = increments(levels([0, 1, 3, 6]), 1, overlapping=True)
        assert [1.0, 2.0, 3.0] == list(out.values)
        assert [1, 2, 3] == list(out.start_indices)

    def test_lag_two(self):
        """
        Tests non-overlapping and overlapping increments at lag 2.
        """
        values = levels([0, 1, 3, 6])
        out = increments(values, 2)
        assert [3.0] == list(out.values)
        assert [2] == list(out.start_indices)
        assert [3.0, 5.0] == list(increments(values, 2, overlapping=True).values)

    def test_lag_too_long(self):
        """
        Tests that a lag must be shorter than the series.
        """
        with pytest.raises(SizeError):
            increments(levels([0, 1, 3, 6]), 4)

    def test_round_trip(self):
        """
        Tests that cumulative sums of the lag-1 increments rebuild the
        series; dyadic values make this exact.
        """
        values = np.array([0.0, 0.5, -0.25, 1.75, 1.5, 3.0])
        rebuilt = np.concatenate([[values[0]], values[0] + np.cumsum(increments(
            levels(values), 1).values)])
        assert np.array_equal(values, rebuilt)

    def test_telescoping(self):
        """
        Tests that non-overlapping increments sum to the covered span.
        """
        rng = np.random.default_rng(5)
        values = np.cumsum(rng.standard_normal(37))
        for lag in (1, 3, 5):
            out = increments(levels(values), lag)
            k = len(out)
            assert values[k * lag] - values[0] == pytest.approx(out.values.sum(), abs=1e-10)

    def test_increment_series_invariants(self):
        """
        Tests the IncrementSeries invariants.
        """
        with pytest.raises(SizeError):
            IncrementSeries(2, [1], [0.0])
        with pytest.raises(FormatError):
            IncrementSeries(2, [2, 3], [0.0, 0.0])
        with pytest.raises(FormatError):
            IncrementSeries(1, [1, 2], [0.0])
        IncrementSeries(2, [2, 3], [0.0, 0.0], overlapping=True)


class TestEnsembleSplit(object):

    def test_exact_division(self):
        """
        Tests a series that divides evenly into windows.
        """
        ens = ensemble_split(levels(np.arange(10.0)), 5)
        assert 2 == ens.member_count
        assert 5 == ens.length
        assert 0 == ens.discarded
        assert "split" == ens.origin

    def test_remainder(self):
        """
        Tests that the tail is discarded and counted.
        """
        ens = ensemble_split(levels(np.arange(11.0)), 5)
        assert 2 == ens.member_count
        assert 1 == ens.discarded

    def test_rebased_members(self):
        """
        Tests that each window is rebased to start at 0.
        """
        ens = ensemble_split(levels([0, 1, 2, 3]), 2)
        assert [[0.0, 1.0], [0.0, 1.0]] == ens.paths.tolist()
        assert [0.0, 1.0] == list(ens.members[1].values)

    def test_full_length_window(self):
        """
        Tests that a window of the full length yields the rebased series.
        """
        series = levels([2.0, 3.0, 1.0])
        ens = ensemble_split(series, 3)
        assert 1 == ens.member_count
        assert list(rebase(series).values) == list(ens.paths[0])

    def test_bad_windows(self):
        """
        Tests windows that are too short or too long.
        """
        with pytest.raises(SizeError):
            ensemble_split(levels([0, 1, 2]), 1)
        with pytest.raises(SizeError):
            ensemble_split(levels([0, 1, 2]), 4)


class TestEnsemble(object):

    def test_members_must_start_at_zero(self):
        """
        Tests the x(0) = 0 invariant.
        """
        with pytest.raises(FormatError):
            Ensemble([[0.0, 1.0], [1.0, 2.0]])

    def test_from_members(self):
        """
        Tests building an ensemble from level series.
        """
        ens = Ensemble.from_members([levels([0, 1, 2]), levels([0, -1, 0])])
        assert 2 == ens.member_count
        assert [1.0, -1.0] == list(ens.column(1))

    def test_from_members_mismatch(self):
        """
        Tests that members must share their length.
        """
        with pytest.raises(SizeError):
            Ensemble.from_members([levels([0, 1, 2]), levels([0, 1])])
