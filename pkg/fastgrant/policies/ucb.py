import logging
from typing import Iterable, List, Optional

import numpy as np

from ..models import PolicyState, Prediction, SlotState
from .base import SchedulingPolicy
from .utils import ucb_index


def select_multiple(
    state: PolicyState, prediction: Prediction, l: int, rng: np.random.Generator
) -> List[int]:
    """
    Grant up to `l` predicted arms. Arms never played while active come first
    (uniformly at random when there are more than `l`), the rest are ranked by
    P_i times their UCB index.

    One uniform is drawn per predicted arm and breaks every tie, so a reference
    implementation sharing the stream reproduces the choice exactly.
    """
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    ids = prediction.ids
    if not ids:
        state.granted = frozenset()
        return []

    tiebreak = rng.random(len(ids))
    unplayed = np.zeros(len(ids), dtype=bool)
    scores = np.zeros(len(ids))
    for k, mtd_id in enumerate(ids):
        arm = state.arm(mtd_id)
        if arm.n_active == 0:
            unplayed[k] = True
        else:
            scores[k] = prediction.predicted[mtd_id] * ucb_index(arm, state.t_active, state.psi)

    # np.lexsort sorts by the last key first
    order = np.lexsort((tiebreak, -scores, ~unplayed))
    chosen = [ids[k] for k in order[:l]]
    state.granted = frozenset(chosen)
    return chosen


def select_single(
    state: PolicyState, prediction: Prediction, rng: np.random.Generator
) -> Optional[int]:
    """
    Single-grant selection; None when nothing is predicted and the slot idles
    """
    chosen = select_multiple(state, prediction, 1, rng)
    return chosen[0] if chosen else None


def update(state: PolicyState, mtd_id: int, reward: float, was_active: bool) -> PolicyState:
    """
    Record the outcome of a grant. Plays on inactive MTDs only count towards n.
    """
    if mtd_id not in state.granted:
        raise ValueError(f"MTD {mtd_id} was not granted in the current slot")
    if not 0 <= reward <= 1:
        raise ValueError(f"reward must lie in [0, 1], got {reward}")
    arm = state.arm(mtd_id)
    arm.n += 1
    if was_active:
        arm.z += reward
        arm.n_active += 1
        state.t_active += 1
    state.granted = state.granted - {mtd_id}
    return state


def close_slot(state: PolicyState) -> PolicyState:
    state.t += 1
    state.granted = frozenset()
    return state


class ProbSleepingUCBPolicy(SchedulingPolicy):
    """
    Sleeping UCB over the predicted active set, weighting each index by the
    predicted activity probability
    """

    name = "prob-sleeping-ucb"
    use_probabilities = True

    def __init__(
        self, grants: int, psi: float, rng: np.random.Generator, arm_ids: Iterable[int] = ()
    ):
        super().__init__(grants)
        self.state = PolicyState(psi=psi)
        for mtd_id in arm_ids:
            self.state.arm(mtd_id)
        self.rng = rng

    def select(self, prediction: Prediction, truth: SlotState) -> List[int]:
        if not self.use_probabilities:
            prediction = Prediction(predicted=dict.fromkeys(prediction.predicted, 1.0))
        chosen = select_multiple(self.state, prediction, self.grants, self.rng)
        if not chosen:
            logging.debug("====== Slot %d idles: empty prediction ======", truth.slot)
        return chosen

    def update(self, mtd_id: int, reward: float, was_active: bool) -> None:
        update(self.state, mtd_id, reward, was_active)

    def end_slot(self) -> None:
        close_slot(self.state)


class SleepingUCBPolicy(ProbSleepingUCBPolicy):
    """
    Sleeping UCB that uses the predicted set but ignores the probabilities
    """

    name = "sleeping-ucb"
    use_probabilities = False
