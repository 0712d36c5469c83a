"""
Named reproduction recipes. A recipe is a list of variants; each variant is a
set of dotted-key overrides applied on top of the base config of a run.
"""

from typing import Any, Dict, List, Tuple

from pydantic import BaseModel

from .config import ConfigError, ExperimentConfig, apply_overrides


class Variant(BaseModel):
    label: str
    overrides: Dict[str, Any]


PERFECT_PREDICTION: Dict[str, Any] = {
    "predictor.prob_interval": [1.0, 1.0],
    "predictor.miss_rate": 0.0,
    "predictor.false_positive_rate": 0.0,
    "predictor.false_positive_interval": None,
}

DELAY_ONLY = {"utility.alpha": 0.0, "utility.beta": 0.0, "utility.gamma": 1.0}
RATE_ONLY = {"utility.alpha": 0.0, "utility.beta": 1.0, "utility.gamma": 0.0}
MIXED_UTILITY = {"utility.alpha": 0.2, "utility.beta": 0.3, "utility.gamma": 0.5}
DEADLINE_SWEEP_MS = (50.0, 100.0, 150.0, 200.0, 250.0, 300.0)
# Confidence given to falsely predicted MTDs, below that of truly active ones.
FALSE_POSITIVE_INTERVAL = [0.05, 0.3]


def _gompertz(a: float, b: float, c: float) -> Dict[str, Any]:
    return {"gompertz.a": a, "gompertz.b": b, "gompertz.c": c}


def _predictor(low: float, false_positive_rate: float = 0.05) -> Dict[str, Any]:
    return {
        "predictor.prob_interval": [low, 1.0],
        "predictor.miss_rate": 0.0,
        "predictor.false_positive_rate": false_positive_rate,
        "predictor.false_positive_interval": FALSE_POSITIVE_INTERVAL,
    }


def _variant(label: str, *parts: Dict[str, Any]) -> Variant:
    overrides: Dict[str, Any] = {}
    for part in parts:
        overrides.update(part)
    return Variant(label=label, overrides=overrides)


def _regret_variants(common: Dict[str, Any], with_plain_ucb: bool) -> List[Variant]:
    learner = {"policy.name": "prob-sleeping-ucb"}
    variants = [
        _variant("prob-sleeping-ucb-0.8", common, learner, _predictor(0.8)),
        _variant("prob-sleeping-ucb-0.9", common, learner, _predictor(0.9)),
    ]
    if with_plain_ucb:
        variants.append(
            _variant("sleeping-ucb", common, {"policy.name": "sleeping-ucb"}, _predictor(0.8))
        )
    variants.append(_variant("perfect", common, learner, PERFECT_PREDICTION))
    variants.append(_variant("random", common, {"policy.name": "random"}, _predictor(0.8)))
    return variants


def _sweep_variants(common: Dict[str, Any]) -> List[Variant]:
    variants: List[Variant] = []
    for deadline_max in DEADLINE_SWEEP_MS:
        sweep = {"traffic.deadline_max_ms": deadline_max}
        for policy in ("prob-sleeping-ucb", "random"):
            variants.append(
                _variant(f"{policy}-dmax{deadline_max:g}", common, sweep, {"policy.name": policy})
            )
    return variants


def _psi_variants(common: Dict[str, Any], psis: Tuple[float, ...]) -> List[Variant]:
    variants = [
        _variant(f"psi-{psi:g}", common, {"policy.name": "prob-sleeping-ucb", "policy.psi": psi})
        for psi in psis
    ]
    variants.append(_variant("random", common, {"policy.name": "random"}))
    return variants


_SINGLE = {"population": 100, "active": 10, "grants": 1}
_MULTI = {"population": 500, "active": 50, "grants": 20}
# Physical figures draw a fresh active set every slot.
_PHYSICAL = {"reward_mode": "physical", "traffic.carryover": False, **_predictor(0.8)}
_SCATTER_DELAY = {**_PHYSICAL, "traffic.deadline_max_ms": 100.0}

RECIPES: Dict[str, List[Variant]] = {
    "fig3": _regret_variants(
        {**_SINGLE, "reward_mode": "synthetic", "policy.psi": 1.0, **MIXED_UTILITY, **_gompertz(1, 8, 0.03)},
        with_plain_ucb=True,
    ),
    "fig4": _sweep_variants(
        {**_SINGLE, **_PHYSICAL, **DELAY_ONLY, **_gompertz(1, 13, 0.025)}
    ),
    "fig5": _psi_variants(
        {**_SINGLE, **_SCATTER_DELAY, **DELAY_ONLY, **_gompertz(1, 7, 0.07)}, (1.0, 6.0, 16.0)
    ),
    "fig6": _psi_variants(
        {**_SINGLE, **_PHYSICAL, "channel.tx_power_dbm": 10.0, **RATE_ONLY},
        (0.5, 2.0, 4.0),
    ),
    "fig7": _psi_variants(
        {**_SINGLE, **_PHYSICAL, "channel.tx_power_dbm": 10.0, **RATE_ONLY},
        (0.5, 1.0, 2.0, 4.0, 8.0, 16.0),
    ),
    "fig8": _regret_variants(
        {**_MULTI, "reward_mode": "synthetic", **MIXED_UTILITY, **_gompertz(1, 8, 0.03)},
        with_plain_ucb=False,
    ),
    "fig9": _sweep_variants(
        {**_MULTI, **_PHYSICAL, **DELAY_ONLY, **_gompertz(1, 13, 0.025)}
    )
    + [
        _variant(
            f"{policy}-scatter",
            _MULTI,
            _SCATTER_DELAY,
            DELAY_ONLY,
            _gompertz(1, 7, 0.07),
            {"policy.name": policy},
        )
        for policy in ("prob-sleeping-ucb", "random")
    ],
}


def recipe_variants(name: str, base: ExperimentConfig) -> List[Tuple[str, ExperimentConfig]]:
    """
    Expand a recipe into labelled configs derived from `base`
    """
    if name not in RECIPES:
        raise ConfigError("recipe", f"unknown recipe '{name}', expected one of {sorted(RECIPES)}")
    return [(variant.label, apply_overrides(base, variant.overrides)) for variant in RECIPES[name]]
