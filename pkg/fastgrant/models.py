import math
from typing import Dict, FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator


class LinkParams(BaseModel):
    """
    Static parameters of one MTD to base station link
    """

    distance_km: float = Field(gt=0)
    tx_power_dbm: float
    shadowing_sigma_db: float = Field(ge=0)
    bandwidth_hz: float = Field(gt=0)
    noise_psd_dbm_hz: float


class ChannelRealization(BaseModel):
    """
    Channel gains of one link for one slot
    """

    large_scale_gain: float = Field(gt=0)
    small_scale_gain: float = Field(gt=0)
    composite_gain: float = Field(gt=0)

    @model_validator(mode="after")
    def check_composite(self) -> "ChannelRealization":
        expected = self.large_scale_gain * self.small_scale_gain
        if not math.isclose(self.composite_gain, expected, rel_tol=1e-12):
            raise ValueError(
                f"composite_gain={self.composite_gain} is not the product of its factors"
            )
        return self


class GompertzParams(BaseModel):
    """
    Shape of the modified Gompertz delay score
    """

    a: float = Field(default=1.0, gt=0, le=1)
    b: float = Field(default=8.0, gt=0)
    c: float = Field(default=0.03, gt=0)


class UtilityWeights(BaseModel):
    """
    Weights of data value, normalized rate and delay score in the utility
    """

    alpha: float = Field(default=0.2, ge=0, le=1)
    beta: float = Field(default=0.3, ge=0, le=1)
    gamma: float = Field(default=0.5, ge=0, le=1)

    @model_validator(mode="after")
    def check_sum(self) -> "UtilityWeights":
        total = self.alpha + self.beta + self.gamma
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"alpha + beta + gamma must equal 1, got {total}")
        return self


class RewardInputs(BaseModel):
    """
    Everything the reward of one granted packet depends on.
    `deadline_ms` is the access budget the packet was born with; the delay
    score is taken at the remaining budget `deadline_ms - elapsed_ms`.
    """

    value: float = Field(ge=0, le=1)
    norm_rate: float = Field(ge=0, le=1)
    rate_bps: float = Field(ge=0)
    deadline_ms: float = Field(ge=0)
    elapsed_ms: float = Field(ge=0)
    rate_threshold_bps: float = Field(default=0.0, ge=0)


class MtdProfile(BaseModel):
    """
    Static description of one machine-type device
    """

    id: int = Field(ge=0)
    distance_km: float = Field(gt=0)
    tx_power_dbm: float
    value_mean: float = Field(ge=0, le=1)
    deadline_range_ms: Tuple[float, float]

    @field_validator("deadline_range_ms")
    @classmethod
    def check_range(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        low, high = value
        if not 0 < low <= high:
            raise ValueError(f"deadline range must satisfy 0 < low <= high, got {value}")
        return value


class Packet(BaseModel):
    """
    A pending uplink packet of an active MTD
    """

    birth_slot: int = Field(ge=0)
    deadline_ms: float = Field(ge=0)
    value: float = Field(ge=0, le=1)

    def elapsed_ms(self, slot: int, slot_ms: float) -> float:
        return (slot - self.birth_slot) * slot_ms

    def remaining_ms(self, slot: int, slot_ms: float) -> float:
        return self.deadline_ms - self.elapsed_ms(slot, slot_ms)


class SlotState(BaseModel):
    """
    Ground truth of one slot: which MTDs hold a packet and what the packets are
    """

    slot: int = Field(ge=0)
    packets: Dict[int, Packet] = Field(default_factory=dict)

    @property
    def active(self) -> FrozenSet[int]:
        return frozenset(self.packets)


class Prediction(BaseModel):
    """
    Predicted active set with per-MTD activity probabilities
    """

    predicted: Dict[int, float] = Field(default_factory=dict)

    @field_validator("predicted")
    @classmethod
    def check_probabilities(cls, value: Dict[int, float]) -> Dict[int, float]:
        for mtd_id, prob in value.items():
            if not 0 < prob <= 1:
                raise ValueError(f"activity probability of MTD {mtd_id} is {prob}, not in (0, 1]")
        return value

    @property
    def ids(self) -> List[int]:
        return sorted(self.predicted)


class PredictorConfig(BaseModel):
    """
    Error model of the emulated source traffic predictor
    """

    prob_interval: Tuple[float, float] = (0.8, 1.0)
    miss_rate: float = Field(default=0.0, ge=0, le=1)
    false_positive_rate: float = Field(default=0.05, ge=0, le=1)
    false_positive_interval: Optional[Tuple[float, float]] = None

    @field_validator("prob_interval", "false_positive_interval")
    @classmethod
    def check_interval(
        cls, value: Optional[Tuple[float, float]]
    ) -> Optional[Tuple[float, float]]:
        if value is not None:
            low, high = value
            if not 0 < low <= high <= 1:
                raise ValueError(f"interval must satisfy 0 < low <= high <= 1, got {value}")
        return value

    @property
    def is_perfect(self) -> bool:
        return (
            self.miss_rate == 0
            and self.false_positive_rate == 0
            and self.prob_interval == (1.0, 1.0)
        )


class PredictionErrorStats(BaseModel):
    """
    Aggregated prediction errors: e1 is 1 - P over truly active predicted MTDs,
    e2 is P over predicted MTDs that were not active
    """

    mean_e1: float = 0.0
    mean_e2: float = 0.0
    misses: int = 0
    false_positives: int = 0


class ArmStats(BaseModel):
    """
    Learning state of one arm (MTD)
    """

    z: float = Field(default=0.0, ge=0)
    n: int = Field(default=0, ge=0)
    n_active: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def check_counts(self) -> "ArmStats":
        if self.n_active > self.n:
            raise ValueError(f"n_active={self.n_active} exceeds n={self.n}")
        if self.z > self.n_active + 1e-9:
            raise ValueError(f"z={self.z} exceeds n_active={self.n_active}")
        return self


class PolicyState(BaseModel):
    """
    Learning state of an index policy. `granted` holds the arms selected in the
    current slot that still await their update.
    """

    arms: Dict[int, ArmStats] = Field(default_factory=dict)
    t: int = Field(default=0, ge=0)
    t_active: int = Field(default=0, ge=0)
    psi: float = Field(default=1.0, gt=0)
    granted: FrozenSet[int] = frozenset()

    @model_validator(mode="after")
    def check_active_plays(self) -> "PolicyState":
        total = sum(arm.n_active for arm in self.arms.values())
        if total != self.t_active:
            raise ValueError(f"t_active={self.t_active} differs from sum of n_active={total}")
        return self

    def arm(self, mtd_id: int) -> ArmStats:
        if mtd_id not in self.arms:
            self.arms[mtd_id] = ArmStats()
        return self.arms[mtd_id]


class SyntheticArms(BaseModel):
    """
    True expected rewards of the arms of a synthetic instance
    """

    means: Dict[int, float]

    @field_validator("means")
    @classmethod
    def check_means(cls, value: Dict[int, float]) -> Dict[int, float]:
        for mtd_id, mean in value.items():
            if not 0 < mean < 1:
                raise ValueError(f"mean of MTD {mtd_id} is {mean}, not in (0, 1)")
        if len(set(value.values())) != len(value):
            raise ValueError("arm means must be pairwise distinct")
        return value


class ExperimentTrace(BaseModel):
    """
    Per-slot log of one replication. Column lists are aligned by slot.
    """

    label: str = "default"
    replication: int = 0
    seed: int = 0
    reward_mode: str = "synthetic"
    selected: List[Tuple[int, ...]] = Field(default_factory=list)
    selected_active: List[Tuple[bool, ...]] = Field(default_factory=list)
    rewards: List[Tuple[float, ...]] = Field(default_factory=list)
    rates: List[Tuple[float, ...]] = Field(default_factory=list)
    selected_deadlines: List[Tuple[float, ...]] = Field(default_factory=list)
    population_deadline: List[float] = Field(default_factory=list)
    oracle: List[Tuple[int, ...]] = Field(default_factory=list)
    oracle_reward: List[float] = Field(default_factory=list)
    regret: List[float] = Field(default_factory=list)
    plays: Dict[int, Tuple[int, int]] = Field(default_factory=dict)
    prediction: PredictionErrorStats = Field(default_factory=PredictionErrorStats)
    idle_slots: int = 0

    @property
    def horizon(self) -> int:
        return len(self.selected)

    @property
    def final_regret(self) -> float:
        return self.regret[-1] if self.regret else 0.0


class RunManifest(BaseModel):
    """
    What to run and where to write it
    """

    config_path: str
    output_dir: str
    seed: int = Field(default=0, ge=0, lt=2**64)
    replications: int = Field(default=1, ge=1)
    recipe: Optional[str] = None
    workers: int = Field(default=1, ge=1)
    pbar: bool = False
