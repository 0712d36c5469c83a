import math

import numpy as np

from .models import GompertzParams, RewardInputs, UtilityWeights


def gompertz_score(deadline_ms: float, p: GompertzParams) -> float:
    """
    Modified Gompertz urgency of a packet with `deadline_ms` left: close to `a`
    for tight deadlines, decaying to 0 for loose ones
    """
    if deadline_ms < 0:
        raise ValueError(f"deadline must be nonnegative, got {deadline_ms} ms")
    return p.a - p.a * math.exp(-p.b * math.exp(-p.c * deadline_ms))


def utility(value: float, norm_rate: float, delay_score: float, w: UtilityWeights) -> float:
    return w.alpha * value + w.beta * norm_rate + w.gamma * delay_score


def reward(inputs: RewardInputs, w: UtilityWeights, g: GompertzParams) -> float:
    """
    Utility of a granted packet, zeroed unless the rate clears the threshold and
    the packet is still within its access budget
    """
    if not inputs.rate_bps > inputs.rate_threshold_bps:
        return 0.0
    if not inputs.deadline_ms > inputs.elapsed_ms:
        return 0.0
    remaining = inputs.deadline_ms - inputs.elapsed_ms
    return utility(inputs.value, inputs.norm_rate, gompertz_score(remaining, g), w)


def reward_batch(
    values: np.ndarray,
    norm_rates: np.ndarray,
    rates_bps: np.ndarray,
    deadlines_ms: np.ndarray,
    elapsed_ms: np.ndarray,
    rate_threshold_bps: float,
    w: UtilityWeights,
    g: GompertzParams,
) -> np.ndarray:
    """
    Vectorized `reward` over aligned arrays
    """
    remaining = np.maximum(deadlines_ms - elapsed_ms, 0.0)
    scores = g.a - g.a * np.exp(-g.b * np.exp(-g.c * remaining))
    utilities = w.alpha * values + w.beta * norm_rates + w.gamma * scores
    passed = (rates_bps > rate_threshold_bps) & (deadlines_ms > elapsed_ms)
    rewards: np.ndarray = np.where(passed, utilities, 0.0)
    return rewards


def deadline_from_budget(total_ms: float, transmit_ms: float, processing_ms: float) -> float:
    """
    Maximum tolerable access delay left after the fixed delay components
    """
    access_ms = total_ms - transmit_ms - processing_ms
    if access_ms < 0:
        raise ValueError(
            f"delay budget {total_ms} ms is smaller than transmit ({transmit_ms} ms)"
            f" plus processing ({processing_ms} ms)"
        )
    return access_ms
