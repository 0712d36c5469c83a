import logging
from typing import Dict, List, Mapping, Sequence

import numpy as np

from .config import ExperimentConfig
from .models import MtdProfile, Packet, Prediction, PredictionErrorStats, PredictorConfig, SlotState


def build_population(config: ExperimentConfig, rng: np.random.Generator) -> List[MtdProfile]:
    """
    Place MTDs uniformly over the cell and draw their value means and deadline ranges
    """
    size = config.population
    channel = config.channel
    traffic = config.traffic
    radii = np.sqrt(
        rng.uniform(channel.min_distance_km**2, channel.cell_radius_km**2, size)
    )
    value_means = rng.uniform(0.0, 1.0, size)
    nominal = rng.uniform(traffic.deadline_min_ms, traffic.deadline_max_ms, size)
    population: List[MtdProfile] = []
    for mtd_id in range(size):
        low = max(traffic.deadline_min_ms, nominal[mtd_id] * (1 - traffic.deadline_spread))
        high = min(traffic.deadline_max_ms, nominal[mtd_id] * (1 + traffic.deadline_spread))
        population.append(
            MtdProfile(
                id=mtd_id,
                distance_km=float(radii[mtd_id]),
                tx_power_dbm=channel.tx_power_dbm,
                value_mean=float(value_means[mtd_id]),
                deadline_range_ms=(float(low), float(high)),
            )
        )
    logging.debug("====== Built population of %d MTDs ======", size)
    return population


def step_activity(
    population: Sequence[MtdProfile],
    k_active: int,
    carryover: Mapping[int, Packet],
    slot: int,
    rng: np.random.Generator,
    slot_ms: float = 1.0,
    value_std: float = 0.1,
) -> SlotState:
    """
    Advance ground truth by one slot: keep unexpired carried packets and top the
    active set up to `k_active` with fresh MTDs drawn uniformly without replacement
    """
    if k_active > len(population):
        raise ValueError(f"k_active={k_active} exceeds population size {len(population)}")

    packets: Dict[int, Packet] = {
        mtd_id: packet
        for mtd_id, packet in carryover.items()
        if packet.remaining_ms(slot, slot_ms) > 0
    }
    idle = [profile for profile in population if profile.id not in packets]
    n_fresh = max(0, k_active - len(packets))
    if n_fresh:
        for index in rng.choice(len(idle), size=n_fresh, replace=False):
            profile = idle[index]
            low, high = profile.deadline_range_ms
            value = float(np.clip(rng.normal(profile.value_mean, value_std), 0.0, 1.0))
            packets[profile.id] = Packet(
                birth_slot=slot, deadline_ms=float(rng.uniform(low, high)), value=value
            )
    return SlotState(slot=slot, packets=dict(sorted(packets.items())))


def predict(
    truth: SlotState,
    population: Sequence[MtdProfile],
    config: PredictorConfig,
    rng: np.random.Generator,
) -> Prediction:
    """
    Emulate an imperfect source traffic predictor. Active MTDs are kept with
    probability 1 - miss_rate, inactive ones slip in with probability
    false_positive_rate; every kept MTD gets an activity probability drawn from
    its interval.
    """
    ids = np.array([profile.id for profile in population], dtype=int)
    active = np.isin(ids, np.fromiter(truth.active, dtype=int, count=len(truth.active)))
    draws = rng.random(len(ids))
    included = np.where(active, draws >= config.miss_rate, draws < config.false_positive_rate)
    true_low, true_high = config.prob_interval
    fp_low, fp_high = config.false_positive_interval or config.prob_interval
    true_probs = rng.uniform(true_low, true_high, len(ids))
    fp_probs = rng.uniform(fp_low, fp_high, len(ids))
    probs = np.where(active, true_probs, fp_probs)
    return Prediction(
        predicted={int(ids[k]): float(probs[k]) for k in np.flatnonzero(included)}
    )


class PredictionTally:
    """
    Running totals of prediction errors over a stream of slots
    """

    def __init__(self) -> None:
        self.e1_sum = 0.0
        self.e1_count = 0
        self.e2_sum = 0.0
        self.e2_count = 0
        self.misses = 0
        self.false_positives = 0

    def add(self, truth: SlotState, prediction: Prediction) -> None:
        active = truth.active
        for mtd_id, prob in prediction.predicted.items():
            if mtd_id in active:
                self.e1_sum += 1.0 - prob
                self.e1_count += 1
            else:
                self.e2_sum += prob
                self.e2_count += 1
                self.false_positives += 1
        self.misses += sum(1 for mtd_id in active if mtd_id not in prediction.predicted)

    def stats(self) -> PredictionErrorStats:
        return PredictionErrorStats(
            mean_e1=self.e1_sum / self.e1_count if self.e1_count else 0.0,
            mean_e2=self.e2_sum / self.e2_count if self.e2_count else 0.0,
            misses=self.misses,
            false_positives=self.false_positives,
        )


def prediction_error_stats(
    truths: Sequence[SlotState], predictions: Sequence[Prediction]
) -> PredictionErrorStats:
    """
    Aggregate e1/e2 errors, misses and false positives over aligned streams
    """
    if len(truths) != len(predictions):
        raise ValueError(
            f"truth stream has {len(truths)} slots but prediction stream has {len(predictions)}"
        )
    tally = PredictionTally()
    for truth, prediction in zip(truths, predictions):
        tally.add(truth, prediction)
    return tally.stats()
