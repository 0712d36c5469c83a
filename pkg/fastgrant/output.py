import math
import os
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import aiofiles
import aiofiles.os
import numpy as np
from pydantic import BaseModel

from .metrics import delay_stats, throughput_stats
from .models import ExperimentTrace
from .utils import format_float


class MetricSummary(BaseModel):
    mean: float
    stderr: Optional[float] = None


class VariantSummary(BaseModel):
    """
    Summary metrics of all replications of one variant
    """

    label: str
    replications: int
    seed: int
    horizon: int
    metrics: Dict[str, MetricSummary]
    bound: Optional[float] = None


class RunSummary(BaseModel):
    seed: int
    replications: int
    recipe: Optional[str] = None
    variants: List[VariantSummary]


def _stderr(values: Sequence[float]) -> Optional[float]:
    if len(values) < 2:
        return None
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def trace_metrics(trace: ExperimentTrace) -> Dict[str, float]:
    mean_selected, mean_population, _ = delay_stats(trace)
    mean_sum_rate, _ = throughput_stats(trace)
    return {
        "final_regret": trace.final_regret,
        "mean_selected_deadline_ms": mean_selected,
        "mean_population_deadline_ms": mean_population,
        "mean_sum_rate_bps": mean_sum_rate,
        "mean_e1": trace.prediction.mean_e1,
        "mean_e2": trace.prediction.mean_e2,
        "misses": float(trace.prediction.misses),
        "false_positives": float(trace.prediction.false_positives),
        "idle_slots": float(trace.idle_slots),
    }


def summarize(traces: Sequence[ExperimentTrace], bound: Optional[float] = None) -> VariantSummary:
    if not traces:
        raise ValueError("cannot summarize an empty list of traces")
    per_trace = [trace_metrics(trace) for trace in traces]
    metrics = {
        name: MetricSummary(
            mean=float(np.mean([row[name] for row in per_trace])),
            stderr=_stderr([row[name] for row in per_trace]),
        )
        for name in per_trace[0]
    }
    return VariantSummary(
        label=traces[0].label,
        replications=len(traces),
        seed=traces[0].seed,
        horizon=traces[0].horizon,
        metrics=metrics,
        bound=bound,
    )


def emit_summary(traces: Sequence[ExperimentTrace], bound: Optional[float] = None) -> str:
    """
    Render the summary metrics of a set of replications as a text table
    """
    summary = summarize(traces, bound)
    lines = [
        f"variant: {summary.label}  replications: {summary.replications}"
        f"  seed: {summary.seed}  horizon: {summary.horizon}",
        f"{'metric':<30}{'mean':>18}{'stderr':>18}",
    ]
    for name, metric in summary.metrics.items():
        stderr = "" if metric.stderr is None else format_float(metric.stderr)
        lines.append(f"{name:<30}{format_float(metric.mean):>18}{stderr:>18}")
    if summary.bound is not None:
        lines.append(f"{'regret_bound':<30}{format_float(summary.bound):>18}{'':>18}")
    return "\n".join(lines) + "\n"


def aggregate_regret(
    traces: Sequence[ExperimentTrace],
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Mean cumulative regret per slot across replications and its standard error
    """
    curves = np.array([trace.regret for trace in traces], dtype=float)
    mean = curves.mean(axis=0)
    if len(traces) < 2:
        return mean, None
    return mean, curves.std(axis=0, ddof=1) / math.sqrt(len(traces))


def _join(values: Iterable[float]) -> str:
    return ";".join(format_float(value) for value in values)


def trace_rows(trace: ExperimentTrace) -> Iterable[List[str]]:
    for slot in range(trace.horizon):
        yield [
            str(slot),
            ";".join(str(mtd_id) for mtd_id in trace.selected[slot]),
            ";".join("1" if flag else "0" for flag in trace.selected_active[slot]),
            _join(trace.rewards[slot]),
            _join(trace.rates[slot]),
            _join(trace.selected_deadlines[slot]),
            ";".join(str(mtd_id) for mtd_id in trace.oracle[slot]),
            format_float(trace.oracle_reward[slot]),
            format_float(trace.regret[slot]),
        ]


TRACE_HEADER = [
    "slot",
    "selected",
    "selected_active",
    "rewards",
    "rates_bps",
    "selected_deadlines_ms",
    "oracle",
    "oracle_reward",
    "regret",
]


async def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    """
    Write a comma-separated file with a header row and LF line endings
    """
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    async with aiofiles.open(path, "w", encoding="utf-8", newline="\n") as f:
        await f.write("\n".join(lines) + "\n")


async def write_variant(directory: str, traces: Sequence[ExperimentTrace]) -> None:
    """
    Write the per-replication traces, the aggregated regret curve and the delay
    and throughput scatter series of one variant
    """
    await aiofiles.os.makedirs(directory, exist_ok=True)
    for trace in traces:
        await write_csv(
            os.path.join(directory, f"trace_rep{trace.replication:03d}.csv"),
            TRACE_HEADER,
            trace_rows(trace),
        )

    mean, stderr = aggregate_regret(traces)
    await write_csv(
        os.path.join(directory, "regret.csv"),
        ["slot", "mean_regret", "stderr"],
        (
            [str(slot), format_float(mean[slot]), "" if stderr is None else format_float(stderr[slot])]
            for slot in range(len(mean))
        ),
    )

    _, _, (delay_slots, delays) = delay_stats(traces[0])
    await write_csv(
        os.path.join(directory, "delay_scatter.csv"),
        ["slot", "value"],
        ([str(slot), format_float(value)] for slot, value in zip(delay_slots, delays)),
    )
    _, (rate_slots, sum_rates) = throughput_stats(traces[0])
    await write_csv(
        os.path.join(directory, "throughput_scatter.csv"),
        ["slot", "value"],
        ([str(slot), format_float(value)] for slot, value in zip(rate_slots, sum_rates)),
    )


async def write_summary(directory: str, summary: RunSummary, table: str) -> None:
    async with aiofiles.open(os.path.join(directory, "summary.json"), "w", encoding="utf-8") as f:
        await f.write(summary.model_dump_json(indent=4) + "\n")
    async with aiofiles.open(os.path.join(directory, "summary.txt"), "w", encoding="utf-8") as f:
        await f.write(table)
