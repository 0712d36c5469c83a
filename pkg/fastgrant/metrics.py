import math
from typing import List, Mapping, Tuple

import numpy as np

from .models import ExperimentTrace

Series = Tuple[List[int], List[float]]


def cumulative_regret(trace: ExperimentTrace, true_means: Mapping[int, float]) -> np.ndarray:
    """
    Cumulative expected regret: per slot, the summed means of the oracle's picks
    minus the summed means of the granted MTDs that were active
    """
    increments = np.zeros(trace.horizon)
    for k, (granted, active, oracle) in enumerate(
        zip(trace.selected, trace.selected_active, trace.oracle)
    ):
        try:
            best = sum(true_means[mtd_id] for mtd_id in oracle)
            achieved = sum(
                true_means[mtd_id] for mtd_id, was_active in zip(granted, active) if was_active
            )
        except KeyError as e:
            raise ValueError(f"no true mean for MTD {e.args[0]}") from e
        # exact-zero gaps can come out as -1 ulp when summed in another order
        increments[k] = max(best - achieved, 0.0)
    regret: np.ndarray = np.cumsum(increments)
    return regret


def delay_stats(trace: ExperimentTrace) -> Tuple[float, float, Series]:
    """
    Mean remaining deadline of the granted MTDs, mean remaining deadline over the
    active sets, and the per-slot mean deadline of the granted MTDs
    """
    granted = [deadline for slot in trace.selected_deadlines for deadline in slot]
    mean_selected = float(np.mean(granted)) if granted else 0.0
    population = [value for value in trace.population_deadline if not math.isnan(value)]
    mean_population = float(np.mean(population)) if population else 0.0
    slots = [slot for slot, deadlines in enumerate(trace.selected_deadlines) if deadlines]
    values = [float(np.mean(trace.selected_deadlines[slot])) for slot in slots]
    return mean_selected, mean_population, (slots, values)


def throughput_stats(trace: ExperimentTrace) -> Tuple[float, Series]:
    """
    Mean per-slot sum-rate over the horizon and the per-slot sum-rate series
    """
    sums = [float(sum(rates)) for rates in trace.rates]
    mean_sum_rate = float(np.mean(sums)) if sums else 0.0
    return mean_sum_rate, (list(range(len(sums))), sums)
