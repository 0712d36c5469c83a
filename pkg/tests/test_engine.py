import numpy as np
import pytest

from fastgrant import qos
from fastgrant.engine import (
    SlotSimulator,
    calibrate_prediction_errors,
    estimate_true_means,
    prepare_experiment,
    run_experiment,
    run_replication,
)
from fastgrant.experiment import ExperimentEnv
from fastgrant.traffic import build_population
from fastgrant.utils import setup_stream

from .conftest import PERFECT_PREDICTOR


class TestSynthetic:
    def test_zero_horizon(self, make_config):
        trace = run_experiment(make_config(horizon=0))
        assert trace.horizon == 0
        assert trace.regret == []
        assert trace.final_regret == 0.0

    def test_oracle_has_no_regret(self, make_config):
        config = make_config(**{"policy.name": "oracle"}, **PERFECT_PREDICTOR)
        trace = run_experiment(config)
        assert trace.horizon == 200
        assert all(value == 0.0 for value in trace.regret)

    def test_two_arm_suboptimal_plays(self, make_config):
        config = make_config(
            horizon=10000,
            population=2,
            active=2,
            **{"synthetic.means": [0.9, 0.1], "policy.psi": 1.0},
            **PERFECT_PREDICTOR,
        )
        trace = run_experiment(config)
        plays, active_plays = trace.plays[1]
        assert plays == active_plays
        assert plays < 200

    def test_regret_is_non_decreasing(self, make_config):
        trace = run_experiment(make_config(**{"policy.name": "random"}))
        assert np.all(np.diff(trace.regret) >= 0)

    def test_idle_slots_accrue_full_regret(self, make_config):
        config = make_config(
            horizon=50, **{"predictor.miss_rate": 1.0, "predictor.false_positive_rate": 0.0}
        )
        trace = run_experiment(config)
        assert trace.idle_slots == 50
        assert all(selected == () for selected in trace.selected)
        assert trace.regret == pytest.approx(np.cumsum(trace.oracle_reward).tolist())

    def test_default_means_are_evenly_spaced(self, make_config):
        setup = prepare_experiment(make_config(population=10, active=3))
        assert list(setup.true_means.values()) == pytest.approx(np.linspace(0.95, 0.05, 10).tolist())

    def test_rewards_are_binary(self, make_config):
        trace = run_experiment(make_config())
        for rewards, active in zip(trace.rewards, trace.selected_active):
            for reward, was_active in zip(rewards, active):
                assert reward in (0.0, 1.0)
                assert was_active or reward == 0.0

    def test_multiple_grants(self, make_config):
        config = make_config(population=50, active=10, grants=4, **PERFECT_PREDICTOR)
        trace = run_experiment(config)
        assert all(len(selected) == 4 for selected in trace.selected)
        assert all(len(set(selected)) == 4 for selected in trace.selected)

    def test_deterministic(self, make_config):
        config = make_config(**{"predictor.miss_rate": 0.1})
        setup = prepare_experiment(config)
        first = run_replication(config, setup, 3)
        assert first == run_replication(config, setup, 3)
        assert first.selected != run_replication(config, setup, 4).selected


class TestPhysical:
    def test_trace_columns(self, make_config):
        config = make_config(horizon=100, reward_mode="physical")
        trace = run_experiment(config)
        for rewards, rates, deadlines, active in zip(
            trace.rewards, trace.rates, trace.selected_deadlines, trace.selected_active
        ):
            assert all(0.0 <= reward <= 1.0 for reward in rewards)
            assert all(rate >= 0.0 for rate in rates)
            assert len(deadlines) == sum(active)
            assert all(deadline > 0 for deadline in deadlines)
        assert np.all(np.diff(trace.regret) >= 0)

    def test_unserved_packets_age(self, make_config):
        config = make_config(
            horizon=30,
            reward_mode="physical",
            rate_threshold_bps=1e12,
            **{"traffic.deadline_min_ms": 200.0, "traffic.deadline_max_ms": 300.0},
        )
        simulator = SlotSimulator(config, prepare_experiment(config))
        trace = simulator.run()
        assert all(reward == 0.0 for rewards in trace.rewards for reward in rewards)
        assert trace.population_deadline[-1] < trace.population_deadline[0]

    def test_deterministic_reward_estimate(self, make_config):
        config = make_config(
            reward_mode="physical",
            **{
                "utility.alpha": 0.0,
                "utility.beta": 0.0,
                "utility.gamma": 1.0,
                "traffic.deadline_spread": 0.0,
            },
        )
        population = build_population(config, setup_stream(config.seed, "population"))
        means = estimate_true_means(config, 50, np.random.default_rng(0), population)
        for profile in population:
            expected = qos.gompertz_score(profile.deadline_range_ms[0], config.gompertz)
            assert means[profile.id] == pytest.approx(expected, rel=1e-9)

    def test_unreachable_rate_threshold(self, make_config):
        config = make_config(reward_mode="physical", rate_threshold_bps=1e12)
        means = estimate_true_means(config, 100, np.random.default_rng(0))
        assert all(mean == 0.0 for mean in means.values())

    def test_invalid_sample_count(self, make_config):
        with pytest.raises(ValueError):
            estimate_true_means(make_config(), 0, np.random.default_rng(0))


class TestCalibration:
    def test_perfect_predictor(self, make_config):
        config = make_config(**PERFECT_PREDICTOR)
        stats = calibrate_prediction_errors(config, prepare_experiment(config))
        assert (stats.mean_e1, stats.mean_e2, stats.misses, stats.false_positives) == (0, 0, 0, 0)

    def test_underweighting(self, make_config):
        config = make_config(**{"predictor.false_positive_rate": 0.0})
        stats = calibrate_prediction_errors(config, prepare_experiment(config))
        assert stats.mean_e1 == pytest.approx(0.1, abs=0.01)
        assert stats.false_positives == 0


class TestExperimentEnv:
    def test_batch_is_ordered(self, make_config):
        env = ExperimentEnv(make_config(horizon=50), label="batch")
        traces = env.step_batch(replications=4)
        assert [trace.replication for trace in traces] == [0, 1, 2, 3]
        assert all(trace.label == "batch" for trace in traces)
        assert traces[2] == env.step(2)

    def test_process_pool_matches_sequential(self, make_config):
        env = ExperimentEnv(make_config(horizon=50))
        assert env.step_batch(replications=3, n_workers=2) == env.step_batch(replications=3)

    def test_worker_errors_propagate(self, make_config, monkeypatch):
        env = ExperimentEnv(make_config(horizon=10))

        def broken(replication):
            raise RuntimeError(f"replication {replication} failed")

        monkeypatch.setattr(env, "step", broken)
        with pytest.raises(RuntimeError):
            env.step_batch(replications=2)
