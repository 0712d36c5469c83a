import logging
import math
import time
from collections import Counter
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from pydantic import BaseModel

from . import channel, qos
from .config import ExperimentConfig
from .metrics import cumulative_regret
from .models import ExperimentTrace, MtdProfile, Packet, PredictionErrorStats, RewardInputs, SlotState
from .policies import build_policy, oracle_policy
from .traffic import PredictionTally, build_population, predict, step_activity
from .utils import replication_streams, setup_stream


class ExperimentSetup(BaseModel):
    """
    Experiment-wide state shared by every replication
    """

    population: List[MtdProfile]
    true_means: Dict[int, float]
    c_max: float


def synthetic_means(config: ExperimentConfig) -> Dict[int, float]:
    """
    Configured arm means, or means evenly spaced from 0.95 down to 0.05
    """
    if config.synthetic.means is not None:
        means = list(config.synthetic.means)
    else:
        means = np.linspace(0.95, 0.05, config.population).tolist()
    return {mtd_id: float(mean) for mtd_id, mean in enumerate(means)}


def estimate_true_means(
    config: ExperimentConfig,
    samples: int,
    rng: np.random.Generator,
    population: Optional[Sequence[MtdProfile]] = None,
) -> Dict[int, float]:
    """
    Monte-Carlo expected reward of each MTD, granted the slot its packet arrives
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if population is None:
        population = build_population(config, setup_stream(config.seed, "population"))
    c_max = channel.max_rate(population, config.channel)
    means: Dict[int, float] = {}
    for profile in population:
        low, high = profile.deadline_range_ms
        deadlines = rng.uniform(low, high, samples)
        values = np.clip(rng.normal(profile.value_mean, config.traffic.value_std, samples), 0.0, 1.0)
        rates = channel.sample_rates(channel.link_params(profile, config.channel), samples, rng)
        rewards = qos.reward_batch(
            values,
            np.minimum(rates / c_max, 1.0),
            rates,
            deadlines,
            np.zeros(samples),
            config.rate_threshold_bps,
            config.utility,
            config.gompertz,
        )
        means[profile.id] = float(rewards.mean())
    return means


def prepare_experiment(config: ExperimentConfig) -> ExperimentSetup:
    """
    Place the population and fix the true means used for regret accounting
    """
    population = build_population(config, setup_stream(config.seed, "population"))
    c_max = channel.max_rate(population, config.channel)
    if config.reward_mode == "synthetic":
        true_means = synthetic_means(config)
    else:
        start = time.time()
        true_means = estimate_true_means(
            config, config.oracle_samples, setup_stream(config.seed, "true_means"), population
        )
        logging.debug(
            "====== Estimated true means of %d MTDs in %.2f seconds ======",
            len(true_means),
            time.time() - start,
        )
    return ExperimentSetup(population=population, true_means=true_means, c_max=c_max)


class SlotSimulator:
    """
    Runs the slot loop of one replication
    """

    def __init__(
        self,
        config: ExperimentConfig,
        setup: ExperimentSetup,
        replication: int = 0,
        label: str = "default",
    ):
        self.config = config
        self.setup = setup
        self.replication = replication
        self.label = label
        self.streams = replication_streams(config.seed, replication)
        self.links = {
            profile.id: channel.link_params(profile, config.channel) for profile in setup.population
        }
        self.policy = build_policy(
            config.policy,
            config.grants,
            [profile.id for profile in setup.population],
            setup.true_means,
            self.streams["policy"],
        )

    def realize(self, mtd_id: int, truth: SlotState) -> Tuple[float, float, bool]:
        """
        Reward, achieved rate and delivery of a grant to an active MTD
        """
        config = self.config
        if config.reward_mode == "synthetic":
            success = self.streams["reward"].random() < self.setup.true_means[mtd_id]
            return float(success), 0.0, True

        packet = truth.packets[mtd_id]
        link = self.links[mtd_id]
        realization = channel.sample_channel(link, self.streams["channel"])
        achieved = channel.rate(link, channel.snr(link, realization.composite_gain))
        inputs = RewardInputs(
            value=packet.value,
            norm_rate=channel.normalized_rate(achieved, self.setup.c_max),
            rate_bps=achieved,
            deadline_ms=packet.deadline_ms,
            elapsed_ms=packet.elapsed_ms(truth.slot, config.slot_ms),
            rate_threshold_bps=config.rate_threshold_bps,
        )
        value = qos.reward(inputs, config.utility, config.gompertz)
        return value, achieved, achieved > config.rate_threshold_bps

    def run(self) -> ExperimentTrace:
        config = self.config
        population = self.setup.population
        tally = PredictionTally()
        carryover: Dict[int, Packet] = {}
        plays: Counter[int] = Counter()
        active_plays: Counter[int] = Counter()
        trace = ExperimentTrace(
            label=self.label,
            replication=self.replication,
            seed=config.seed,
            reward_mode=config.reward_mode,
        )
        start = time.time()

        for slot in range(config.horizon):
            truth = step_activity(
                population,
                config.active,
                carryover,
                slot,
                self.streams["traffic"],
                config.slot_ms,
                config.traffic.value_std,
            )
            prediction = predict(truth, population, config.predictor, self.streams["predictor"])
            tally.add(truth, prediction)

            granted = self.policy.select(prediction, truth)
            served: Set[int] = set()
            flags: List[bool] = []
            rewards: List[float] = []
            rates: List[float] = []
            deadlines: List[float] = []
            for mtd_id in granted:
                was_active = mtd_id in truth.packets
                value, achieved = 0.0, 0.0
                if was_active:
                    value, achieved, delivered = self.realize(mtd_id, truth)
                    deadlines.append(truth.packets[mtd_id].remaining_ms(slot, config.slot_ms))
                    active_plays[mtd_id] += 1
                    if delivered:
                        served.add(mtd_id)
                plays[mtd_id] += 1
                self.policy.update(mtd_id, value, was_active)
                flags.append(was_active)
                rewards.append(value)
                rates.append(achieved)
            if granted:
                self.policy.end_slot()
            else:
                trace.idle_slots += 1

            oracle = oracle_policy(truth, self.setup.true_means, config.grants)
            remaining = [packet.remaining_ms(slot, config.slot_ms) for packet in truth.packets.values()]

            trace.selected.append(tuple(granted))
            trace.selected_active.append(tuple(flags))
            trace.rewards.append(tuple(rewards))
            trace.rates.append(tuple(rates))
            trace.selected_deadlines.append(tuple(deadlines))
            trace.population_deadline.append(float(np.mean(remaining)) if remaining else math.nan)
            trace.oracle.append(tuple(oracle))
            trace.oracle_reward.append(sum(self.setup.true_means[mtd_id] for mtd_id in oracle))

            if config.traffic.carryover:
                carryover = {
                    mtd_id: packet
                    for mtd_id, packet in truth.packets.items()
                    if mtd_id not in served
                }

        trace.regret = cumulative_regret(trace, self.setup.true_means).tolist()
        trace.plays = {mtd_id: (plays[mtd_id], active_plays[mtd_id]) for mtd_id in sorted(plays)}
        trace.prediction = tally.stats()
        logging.debug(
            "====== Replication %d of '%s' finished: %d slots, final regret %.3f, %.2f seconds ======",
            self.replication,
            self.label,
            config.horizon,
            trace.final_regret,
            time.time() - start,
        )
        return trace


def run_replication(
    config: ExperimentConfig, setup: ExperimentSetup, replication: int, label: str = "default"
) -> ExperimentTrace:
    return SlotSimulator(config, setup, replication, label).run()


def run_experiment(config: ExperimentConfig) -> ExperimentTrace:
    """
    Run replication 0 of an experiment
    """
    return run_replication(config, prepare_experiment(config), 0)


def calibrate_prediction_errors(
    config: ExperimentConfig, setup: ExperimentSetup
) -> PredictionErrorStats:
    """
    Run traffic and predictor alone to measure the prediction errors of a config
    """
    rng = setup_stream(config.seed, "calibration")
    tally = PredictionTally()
    carryover: Dict[int, Packet] = {}
    for slot in range(config.bound.calibration_horizon):
        truth = step_activity(
            setup.population, config.active, carryover, slot, rng, config.slot_ms, config.traffic.value_std
        )
        tally.add(truth, predict(truth, setup.population, config.predictor, rng))
        if config.traffic.carryover:
            carryover = dict(truth.packets)
    return tally.stats()
