from typing import Iterable, Mapping

import numpy as np

from ..config import PolicyConfig
from .base import SchedulingPolicy
from .baseline import OraclePolicy, RandomPolicy, oracle_policy, random_policy
from .ucb import (
    ProbSleepingUCBPolicy,
    SleepingUCBPolicy,
    close_slot,
    select_multiple,
    select_single,
    update,
)
from .utils import confidence_radius, ucb_index


def build_policy(
    config: PolicyConfig,
    grants: int,
    arm_ids: Iterable[int],
    true_means: Mapping[int, float],
    rng: np.random.Generator,
) -> SchedulingPolicy:
    """
    Instantiate the scheduler named in the config
    """
    if config.name == "prob-sleeping-ucb":
        return ProbSleepingUCBPolicy(grants, config.psi, rng, arm_ids)
    if config.name == "sleeping-ucb":
        return SleepingUCBPolicy(grants, config.psi, rng, arm_ids)
    if config.name == "random":
        return RandomPolicy(grants, rng)
    return OraclePolicy(grants, true_means)


__all__ = [
    "OraclePolicy",
    "ProbSleepingUCBPolicy",
    "RandomPolicy",
    "SchedulingPolicy",
    "SleepingUCBPolicy",
    "build_policy",
    "close_slot",
    "confidence_radius",
    "oracle_policy",
    "random_policy",
    "select_multiple",
    "select_single",
    "ucb_index",
    "update",
]
