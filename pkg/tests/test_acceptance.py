"""
Long-running experiments checking the headline behaviour of the schedulers on
the shipped recipes. Deselected by default; run with `pytest -m slow`.

Horizons follow the desk scale of 10^5 slots; replication counts are reduced
to keep each check within a few minutes on a laptop.
"""

from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np
import pytest

from fastgrant.bounds import bound_for_config
from fastgrant.config import ExperimentConfig, apply_overrides, config_from_flat, parse_config
from fastgrant.experiment import ExperimentEnv
from fastgrant.metrics import delay_stats, throughput_stats
from fastgrant.models import ExperimentTrace
from fastgrant.recipes import PERFECT_PREDICTION, recipe_variants

from .conftest import PERFECT_PREDICTOR

pytestmark = pytest.mark.slow

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"
HORIZON = 100000
WORKERS = 4


def _recipe(name: str, horizon: int = HORIZON) -> Dict[str, ExperimentConfig]:
    base = parse_config((CONFIG_DIR / f"{name}.conf").read_text(encoding="utf-8"))
    return dict(recipe_variants(name, apply_overrides(base, {"horizon": horizon})))


def _traces(config: ExperimentConfig, replications: int) -> List[ExperimentTrace]:
    return ExperimentEnv(config).step_batch(replications=replications, n_workers=WORKERS)


def _mean_regret_curve(traces: Sequence[ExperimentTrace]) -> np.ndarray:
    return np.mean([trace.regret for trace in traces], axis=0)


def _final_regret(traces: Sequence[ExperimentTrace]) -> float:
    return float(np.mean([trace.final_regret for trace in traces]))


def _selected_deadline(traces: Sequence[ExperimentTrace]) -> float:
    return float(np.mean([delay_stats(trace)[0] for trace in traces]))


def _sum_rate(traces: Sequence[ExperimentTrace]) -> float:
    return float(np.mean([throughput_stats(trace)[0] for trace in traces]))


class TestSingleGrantRegret:
    def test_learner_regret_is_sublinear(self):
        regret = _mean_regret_curve(_traces(_recipe("fig3")["perfect"], 10))
        assert regret[-1] / HORIZON < 0.5 * regret[9999] / 10000

        slots = np.arange(9999, HORIZON, 100)
        log_t = np.log(slots + 1.0)
        slope, intercept = np.polyfit(log_t, regret[slots], 1)
        residual = regret[slots] - (slope * log_t + intercept)
        r_squared = 1 - np.sum(residual**2) / np.sum((regret[slots] - regret[slots].mean()) ** 2)
        assert slope > 0
        assert r_squared > 0.9

    def test_random_regret_is_linear(self):
        config = apply_overrides(_recipe("fig3")["random"], PERFECT_PREDICTION)
        regret = _mean_regret_curve(_traces(config, 4))
        assert regret[-1] / HORIZON == pytest.approx(regret[9999] / 10000, rel=0.1)

    def test_probability_weighting_lowers_regret(self):
        variants = _recipe("fig3")
        plain = variants["sleeping-ucb"]
        for label, ratio in (("prob-sleeping-ucb-0.8", 0.70), ("prob-sleeping-ucb-0.9", 0.90)):
            weighted = variants[label]
            baseline = apply_overrides(
                plain, {"predictor.prob_interval": list(weighted.predictor.prob_interval)}
            )
            assert _final_regret(_traces(weighted, 4)) <= ratio * _final_regret(_traces(baseline, 4))


class TestPhysicalMode:
    def test_delay_reduction(self):
        variants = _recipe("fig4")
        learner = _traces(variants["prob-sleeping-ucb-dmax300"], 4)
        random = _traces(variants["random-dmax300"], 4)
        assert _selected_deadline(learner) <= 0.45 * _selected_deadline(random)

        population = float(np.mean([delay_stats(trace)[1] for trace in random]))
        assert _selected_deadline(random) == pytest.approx(population, rel=0.05)

    def test_throughput_gain(self):
        variants = _recipe("fig6")
        random = _sum_rate(_traces(variants["random"], 4))
        rates = [_sum_rate(_traces(variants[f"psi-{psi:g}"], 4)) for psi in (0.5, 2.0, 4.0)]
        assert rates[0] >= 1.5 * random
        for lower_psi, higher_psi in zip(rates, rates[1:]):
            assert higher_psi <= 1.05 * lower_psi


class TestMultiGrantRegret:
    def test_learner_beats_random(self):
        variants = _recipe("fig8")
        regrets = {
            label: _final_regret(_traces(variants[label], 2))
            for label in ("prob-sleeping-ucb-0.8", "prob-sleeping-ucb-0.9", "perfect", "random")
        }
        for label in ("prob-sleeping-ucb-0.8", "prob-sleeping-ucb-0.9"):
            assert regrets[label] <= 0.5 * regrets["random"]
            assert regrets["perfect"] < regrets[label]


class TestBoundDominance:
    def test_bound_dominates_empirical_regret(self):
        flat = {"horizon": HORIZON, "population": 5, "active": 5, **PERFECT_PREDICTOR}
        regret = _mean_regret_curve(_traces(config_from_flat(flat), 50))
        for horizon in (1000, 10000, HORIZON):
            bound = bound_for_config(config_from_flat({**flat, "horizon": horizon}))
            assert regret[horizon - 1] <= bound
