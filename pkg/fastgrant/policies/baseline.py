from typing import List, Mapping

import numpy as np

from ..models import Prediction, SlotState
from .base import SchedulingPolicy


def random_policy(prediction: Prediction, l: int, rng: np.random.Generator) -> List[int]:
    """
    Uniform sample without replacement of up to `l` predicted MTDs
    """
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    ids = prediction.ids
    if not ids:
        return []
    picks = rng.choice(len(ids), size=min(l, len(ids)), replace=False)
    return [ids[k] for k in picks]


def oracle_policy(truth: SlotState, true_means: Mapping[int, float], l: int) -> List[int]:
    """
    The `l` truly active MTDs with the highest expected reward, lower id first on ties
    """
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    missing = [mtd_id for mtd_id in truth.active if mtd_id not in true_means]
    if missing:
        raise ValueError(f"no true mean for MTDs {sorted(missing)}")
    ranked = sorted(truth.active, key=lambda mtd_id: (-true_means[mtd_id], mtd_id))
    return ranked[:l]


class RandomPolicy(SchedulingPolicy):
    """
    Grants uniformly at random among the predicted MTDs
    """

    name = "random"

    def __init__(self, grants: int, rng: np.random.Generator):
        super().__init__(grants)
        self.rng = rng

    def select(self, prediction: Prediction, truth: SlotState) -> List[int]:
        return random_policy(prediction, self.grants, self.rng)


class OraclePolicy(SchedulingPolicy):
    """
    Clairvoyant scheduler that sees the true active set and the true means
    """

    name = "oracle"

    def __init__(self, grants: int, true_means: Mapping[int, float]):
        super().__init__(grants)
        self.true_means = dict(true_means)

    def select(self, prediction: Prediction, truth: SlotState) -> List[int]:
        return oracle_policy(truth, self.true_means, self.grants)
