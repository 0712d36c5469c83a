import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, ValidationInfo, field_validator

from .models import GompertzParams, PredictorConfig, UtilityWeights

PolicyName = Literal["prob-sleeping-ucb", "sleeping-ucb", "random", "oracle"]
RewardMode = Literal["synthetic", "physical"]


class ConfigError(ValueError):
    """
    Raised when a configuration document or manifest is invalid
    """

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PolicyConfig(_Section):
    name: PolicyName = "prob-sleeping-ucb"
    psi: float = Field(default=1.0, gt=0)


class ChannelConfig(_Section):
    bandwidth_hz: float = Field(default=360e3, gt=0)
    noise_psd_dbm_hz: float = -174.0
    shadowing_sigma_db: float = Field(default=10.0, ge=0)
    tx_power_dbm: float = 10.0
    cell_radius_km: float = Field(default=0.5, gt=0)
    min_distance_km: float = Field(default=0.035, gt=0)

    @field_validator("min_distance_km")
    @classmethod
    def check_min_distance(cls, value: float, info: ValidationInfo) -> float:
        radius = info.data.get("cell_radius_km")
        if radius is not None and value > radius:
            raise ValueError(f"min_distance_km={value} exceeds cell_radius_km={radius}")
        return value


class TrafficConfig(_Section):
    deadline_min_ms: float = Field(default=1.0, gt=0)
    deadline_max_ms: float = Field(default=300.0, gt=0)
    deadline_spread: float = Field(default=0.1, ge=0)
    value_std: float = Field(default=0.1, ge=0)
    carryover: bool = True

    @field_validator("deadline_max_ms")
    @classmethod
    def check_deadlines(cls, value: float, info: ValidationInfo) -> float:
        low = info.data.get("deadline_min_ms")
        if low is not None and value < low:
            raise ValueError(f"deadline_max_ms={value} is below deadline_min_ms={low}")
        return value


class SyntheticConfig(_Section):
    means: Optional[List[float]] = None

    @field_validator("means")
    @classmethod
    def check_means(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None:
            if any(not 0 < mean < 1 for mean in value):
                raise ValueError("every mean must lie in (0, 1)")
            if len(set(value)) != len(value):
                raise ValueError("means must be pairwise distinct")
        return value


class BoundConfig(_Section):
    f_e1: float = Field(default=0.0, ge=0)
    f_e2: float = Field(default=0.0, ge=0)
    calibrate: bool = False
    calibration_horizon: int = Field(default=1000, ge=1)


class _StrictPredictorConfig(PredictorConfig):
    model_config = ConfigDict(extra="forbid")


class _StrictUtilityWeights(UtilityWeights):
    model_config = ConfigDict(extra="forbid")


class _StrictGompertzParams(GompertzParams):
    model_config = ConfigDict(extra="forbid")


class ExperimentConfig(_Section):
    """
    Complete description of one experiment. Field order matters: cross-field
    checks only see the fields declared above them.
    """

    seed: int = Field(default=0, ge=0, lt=2**64)
    replications: int = Field(default=1, ge=1)
    horizon: int = Field(default=10000, ge=0)
    slot_ms: float = Field(default=1.0, gt=0)
    population: int = Field(default=100, ge=1)
    active: int = Field(default=10, ge=0)
    grants: int = Field(default=1, ge=1)
    reward_mode: RewardMode = "synthetic"
    rate_threshold_bps: float = Field(default=0.0, ge=0)
    oracle_samples: int = Field(default=2000, ge=1)
    policy: PolicyConfig = Field(default_factory=PolicyConfig)
    utility: _StrictUtilityWeights = Field(default_factory=_StrictUtilityWeights)
    gompertz: _StrictGompertzParams = Field(default_factory=_StrictGompertzParams)
    predictor: _StrictPredictorConfig = Field(default_factory=_StrictPredictorConfig)
    channel: ChannelConfig = Field(default_factory=ChannelConfig)
    traffic: TrafficConfig = Field(default_factory=TrafficConfig)
    synthetic: SyntheticConfig = Field(default_factory=SyntheticConfig)
    bound: BoundConfig = Field(default_factory=BoundConfig)

    @field_validator("active")
    @classmethod
    def check_active(cls, value: int, info: ValidationInfo) -> int:
        population = info.data.get("population")
        if population is not None and value > population:
            raise ValueError(f"active={value} exceeds population={population}")
        return value

    @field_validator("synthetic")
    @classmethod
    def check_synthetic(cls, value: SyntheticConfig, info: ValidationInfo) -> SyntheticConfig:
        population = info.data.get("population")
        if value.means is not None and population is not None and len(value.means) != population:
            raise ValueError(
                f"synthetic.means has {len(value.means)} entries for population={population}"
            )
        return value


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _insert(tree: Dict[str, Any], key: str, value: Any) -> None:
    *sections, leaf = key.split(".")
    node = tree
    for section in sections:
        child = node.setdefault(section, {})
        if not isinstance(child, dict):
            raise ConfigError(key, f"'{section}' is a value, not a section")
        node = child
    if isinstance(node.get(leaf), dict):
        raise ConfigError(key, "is a section, not a value")
    node[leaf] = value


def config_from_flat(flat: Dict[str, Any]) -> ExperimentConfig:
    """
    Build and validate a config from dotted keys
    """
    tree: Dict[str, Any] = {}
    for key, value in flat.items():
        _insert(tree, key, value)
    try:
        return ExperimentConfig.model_validate(tree)
    except ValidationError as e:
        error = e.errors()[0]
        key = ".".join(str(part) for part in error["loc"])
        raise ConfigError(key, error["msg"]) from e


def parse_config(text: str) -> ExperimentConfig:
    """
    Parse a flat `key = value` document with dotted section prefixes
    """
    flat: Dict[str, Any] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line, f"line {lineno} is not of the form 'key = value'")
        key, raw_value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("", f"line {lineno} has an empty key")
        if key in flat:
            raise ConfigError(key, f"duplicate key on line {lineno}")
        flat[key] = _parse_value(raw_value)
    return config_from_flat(flat)


def flatten_config(config: ExperimentConfig) -> Dict[str, Any]:
    """
    Return the config as a mapping of dotted keys to JSON-compatible values
    """
    flat: Dict[str, Any] = {}

    def walk(prefix: str, node: Dict[str, Any]) -> None:
        for name, value in node.items():
            key = f"{prefix}{name}"
            if isinstance(value, dict):
                walk(f"{key}.", value)
            else:
                flat[key] = value

    walk("", config.model_dump(mode="json"))
    return flat


def serialize_config(config: ExperimentConfig) -> str:
    """
    Render the canonical document for a config
    """
    flat = flatten_config(config)
    return "".join(f"{key} = {json.dumps(flat[key])}\n" for key in sorted(flat))


def apply_overrides(config: ExperimentConfig, overrides: Dict[str, Any]) -> ExperimentConfig:
    """
    Return a copy of the config with the dotted-key overrides applied
    """
    flat = flatten_config(config)
    for key in overrides:
        if key not in flat:
            raise ConfigError(key, "unknown key")
    flat.update(overrides)
    return config_from_flat(flat)
