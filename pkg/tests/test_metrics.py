import math

import numpy as np
import pytest

from fastgrant.metrics import cumulative_regret, delay_stats, throughput_stats
from fastgrant.models import ExperimentTrace

MEANS = {0: 0.9, 1: 0.5, 2: 0.2}


def _trace(selected, active, oracle) -> ExperimentTrace:
    return ExperimentTrace(selected=selected, selected_active=active, oracle=oracle)


class TestCumulativeRegret:
    def test_best_arm_every_slot(self):
        trace = _trace([(0,), (1,), (0,)], [(True,), (True,), (True,)], [(0,), (1,), (0,)])
        assert cumulative_regret(trace, MEANS).tolist() == [0.0, 0.0, 0.0]

    def test_inactive_grant_costs_best_mean(self):
        trace = _trace([(1,)], [(False,)], [(0,)])
        assert cumulative_regret(trace, MEANS).tolist() == pytest.approx([0.9])

    def test_suboptimal_grant(self):
        trace = _trace([(1,)], [(True,)], [(0,)])
        assert cumulative_regret(trace, MEANS).tolist() == pytest.approx([0.4])

    def test_idle_slot(self):
        trace = _trace([(), (0,)], [(), (True,)], [(0,), (0,)])
        assert cumulative_regret(trace, MEANS).tolist() == pytest.approx([0.9, 0.9])

    def test_multiple_grants(self):
        trace = _trace([(0, 2)], [(True, True)], [(0, 1)])
        assert cumulative_regret(trace, MEANS).tolist() == pytest.approx([0.3])

    def test_missing_mean(self):
        with pytest.raises(ValueError):
            cumulative_regret(_trace([(7,)], [(True,)], [(0,)]), MEANS)


class TestDelayStats:
    def test_single_mtd_active_sets(self):
        trace = ExperimentTrace(
            selected=[(0,), (1,)],
            selected_deadlines=[(40.0,), (10.0,)],
            population_deadline=[40.0, 10.0],
        )
        mean_selected, mean_population, (slots, values) = delay_stats(trace)
        assert mean_selected == mean_population == pytest.approx(25.0)
        assert slots == [0, 1] and values == [40.0, 10.0]

    def test_constant_deadlines(self):
        trace = ExperimentTrace(
            selected=[(0, 1), (2,), ()],
            selected_deadlines=[(30.0, 30.0), (30.0,), ()],
            population_deadline=[30.0, 30.0, math.nan],
        )
        mean_selected, mean_population, (slots, _) = delay_stats(trace)
        assert mean_selected == 30.0 and mean_population == 30.0
        assert slots == [0, 1]

    def test_empty_trace(self):
        assert delay_stats(ExperimentTrace())[:2] == (0.0, 0.0)


class TestThroughputStats:
    def test_no_grants(self):
        trace = ExperimentTrace(selected=[(), ()], rates=[(), ()])
        assert throughput_stats(trace)[0] == 0.0

    def test_fixed_rate(self):
        trace = ExperimentTrace(selected=[(0,)] * 5, rates=[(2e5,)] * 5)
        assert throughput_stats(trace)[0] == pytest.approx(2e5)

    def test_additive_over_grants(self):
        trace = ExperimentTrace(selected=[(0, 1, 2)] * 4, rates=[(1e5, 1e5, 1e5)] * 4)
        mean, (slots, sums) = throughput_stats(trace)
        assert mean == pytest.approx(3e5)
        np.testing.assert_allclose(sums, 3e5)
        assert slots == [0, 1, 2, 3]
