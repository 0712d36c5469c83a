import math

import numpy as np
import pytest

from fastgrant.bounds import (
    bound_for_config,
    confidence_coverage_test,
    coverage_bound,
    theoretical_regret_bound,
)
from fastgrant.models import SyntheticArms

from .conftest import PERFECT_PREDICTOR

TWO_ARMS = SyntheticArms(means={0: 0.9, 1: 0.5})
UNIT = {0: 1.0, 1: 1.0}


class TestTheoreticalRegretBound:
    def test_reference_value(self):
        assert theoretical_regret_bound(TWO_ARMS, UNIT, 1.0, 10**4) == pytest.approx(460.5, abs=0.5)

    def test_second_error_term_is_additive(self):
        base = theoretical_regret_bound(TWO_ARMS, UNIT, 1.0, 10**4)
        with_e2 = theoretical_regret_bound(TWO_ARMS, UNIT, 1.0, 10**4, f_e2=0.01)
        assert with_e2 - base == pytest.approx(0.9 * 0.01 * 10**4)

    def test_linear_in_psi(self):
        single = theoretical_regret_bound(TWO_ARMS, UNIT, 1.0, 10**4)
        assert theoretical_regret_bound(TWO_ARMS, UNIT, 2.0, 10**4) == pytest.approx(2 * single)

    def test_probabilities_weight_the_gaps(self):
        probs = {0: 1.0, 1: 0.5}
        expected = 8 * math.log(10**4 * 0.75) / (0.9 - 0.25) ** 2
        assert theoretical_regret_bound(TWO_ARMS, probs, 1.0, 10**4) == pytest.approx(expected)

    def test_tied_weighted_means(self):
        with pytest.raises(ValueError):
            theoretical_regret_bound(TWO_ARMS, {0: 0.5, 1: 0.9}, 1.0, 10**4)

    def test_short_horizon_is_never_negative(self):
        probs = {0: 0.9, 1: 0.9}
        assert theoretical_regret_bound(TWO_ARMS, probs, 1.0, 1) == 0.0
        assert theoretical_regret_bound(TWO_ARMS, probs, 1.0, 1, f_e1=0.1) > 0.0

    def test_bound_for_one_slot(self, make_config):
        config = make_config(population=5, active=5, horizon=1)
        assert bound_for_config(config) >= 0.0

    def test_missing_probability(self):
        with pytest.raises(ValueError):
            theoretical_regret_bound(TWO_ARMS, {0: 1.0}, 1.0, 100)

    def test_invalid_horizon(self):
        with pytest.raises(ValueError):
            theoretical_regret_bound(TWO_ARMS, UNIT, 1.0, 0)


class TestCoverage:
    def test_bound_values(self):
        np.testing.assert_allclose(coverage_bound(3, 1.0), [2.0, 0.5, 2 / 9])

    def test_large_psi_never_violates(self):
        rates = confidence_coverage_test(4.0, 1000, 1000, np.random.default_rng(0))
        assert rates.shape == (1000,)
        assert np.all(rates[1:] == 0.0)

    def test_violation_rate_within_bound(self):
        replications = 1000
        rates = confidence_coverage_test(1.0, 1000, replications, np.random.default_rng(1))
        bound = np.minimum(coverage_bound(1000, 1.0), 1.0)
        stderr = np.sqrt(bound * (1 - bound) / replications)
        # one violation is 1/replications, above 2/t^2 + 3 SE for t beyond ~140
        allowed = bound + 3 * stderr + 1.0 / replications
        assert np.all(rates[1:] <= allowed[1:])

    def test_too_few_replications(self):
        with pytest.raises(ValueError):
            confidence_coverage_test(1.0, 10, 50, np.random.default_rng(0))


class TestBoundForConfig:
    def test_perfect_prediction(self, make_config):
        config = make_config(population=5, active=5, horizon=1000, **PERFECT_PREDICTOR)
        means = SyntheticArms(means=dict(enumerate(np.linspace(0.95, 0.05, 5).tolist())))
        expected = theoretical_regret_bound(means, dict.fromkeys(range(5), 1.0), 1.0, 1000)
        assert bound_for_config(config) == pytest.approx(expected)

    def test_calibrated_errors_raise_the_bound(self, make_config):
        config = make_config(population=5, active=2, horizon=1000)
        calibrated = make_config(
            population=5, active=2, horizon=1000, **{"bound.calibrate": True}
        )
        assert bound_for_config(calibrated) > bound_for_config(config)
