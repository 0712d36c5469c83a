from typing import Any, Callable

import pytest

from fastgrant.config import ExperimentConfig, config_from_flat

PERFECT_PREDICTOR = {
    "predictor.prob_interval": [1.0, 1.0],
    "predictor.miss_rate": 0.0,
    "predictor.false_positive_rate": 0.0,
}


@pytest.fixture
def make_config() -> Callable[..., ExperimentConfig]:
    """
    Build a small validated config from dotted-key overrides, e.g.
    make_config(horizon=100, **{"policy.name": "random"})
    """

    def factory(**overrides: Any) -> ExperimentConfig:
        flat = {"horizon": 200, "population": 20, "active": 5, "oracle_samples": 200}
        flat.update(overrides)
        return config_from_flat(flat)

    return factory
