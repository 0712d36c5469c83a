import logging
import math
from typing import Mapping, Optional

import numpy as np

from .config import ExperimentConfig
from .engine import ExperimentSetup, calibrate_prediction_errors, prepare_experiment
from .models import SyntheticArms


def theoretical_regret_bound(
    arms: SyntheticArms,
    probs: Mapping[int, float],
    psi: float,
    horizon: int,
    f_e1: float = 0.0,
    f_e2: float = 0.0,
) -> float:
    """
    Upper bound on the expected regret of probabilistic sleeping UCB after
    `horizon` slots. Arms are ranked by P_i * mu_i and every consecutive gap
    contributes 1 / gap^2; the O(1) term is taken as zero.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    missing = [mtd_id for mtd_id in arms.means if mtd_id not in probs]
    if missing:
        raise ValueError(f"no activity probability for arms {sorted(missing)}")

    weighted = sorted((probs[i] * mean for i, mean in arms.means.items()), reverse=True)
    gaps = np.diff(weighted)
    if np.any(gaps == 0):
        raise ValueError("weighted means P_i * mu_i must be pairwise distinct")

    p_av = float(np.mean([probs[i] for i in arms.means]))
    # log term clamped at 0 for T * P_av < 1
    log_term = 8 * psi * math.log(max(horizon * p_av, 1.0))
    inverse_gaps = float(np.sum(1.0 / gaps**2))
    mu_best = max(arms.means.values())
    return (log_term + f_e1 * horizon) * inverse_gaps + mu_best * f_e2 * horizon


def coverage_bound(horizon: int, psi: float) -> np.ndarray:
    """
    Hoeffding bound 2 / t^(2 psi) on the probability that the confidence
    interval misses the true mean, for t = 1..horizon
    """
    t = np.arange(1, horizon + 1, dtype=float)
    bound: np.ndarray = 2.0 / t ** (2 * psi)
    return bound


def confidence_coverage_test(
    psi: float,
    horizon: int,
    replications: int,
    rng: np.random.Generator,
    mean: float = 0.5,
) -> np.ndarray:
    """
    Play a single Bernoulli arm every slot and return, for t = 1..horizon, the
    fraction of replications whose empirical mean lies outside
    [mean_hat - r, mean_hat + r] with r = sqrt(psi ln t / t)
    """
    if replications < 100:
        raise ValueError(f"replications must be >= 100, got {replications}")
    t = np.arange(1, horizon + 1, dtype=float)
    radius = np.sqrt(psi * np.log(t) / t)
    violations = np.zeros(horizon)
    for _ in range(replications):
        rewards = rng.random(horizon) < mean
        estimates = np.cumsum(rewards) / t
        violations += np.abs(estimates - mean) > radius
    rates: np.ndarray = violations / replications
    return rates


def bound_for_config(config: ExperimentConfig, setup: Optional[ExperimentSetup] = None) -> float:
    """
    Evaluate the regret bound for an experiment. Every arm gets the midpoint of
    the predictor's probability interval; f(e1), f(e2) come from the config or
    from a calibration run of the predictor.
    """
    if setup is None:
        setup = prepare_experiment(config)
    if config.bound.calibrate:
        errors = calibrate_prediction_errors(config, setup)
        f_e1, f_e2 = errors.mean_e1, errors.mean_e2
        logging.info("Calibrated prediction errors: f(e1)=%.4f f(e2)=%.4f", f_e1, f_e2)
    else:
        f_e1, f_e2 = config.bound.f_e1, config.bound.f_e2
    prob = sum(config.predictor.prob_interval) / 2
    arms = SyntheticArms(means=setup.true_means)
    return theoretical_regret_bound(
        arms,
        dict.fromkeys(arms.means, prob),
        config.policy.psi,
        max(config.horizon, 1),
        f_e1,
        f_e2,
    )
