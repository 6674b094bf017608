"""Evaluation metrics over training histories."""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from orbitqaoa.history import History
from orbitqaoa.utils import InvalidArgumentError

CONVERGENCE_FRACTION = 0.999


def acr(estimate: float, maxcut: float) -> float:
    """Approximated cut ratio."""
    if maxcut <= 0:
        raise InvalidArgumentError(f"maxcut must be positive, got {maxcut}")
    return estimate / maxcut


def steps_to_converge(history: History) -> int:
    """First step whose ACR reaches 99.9% of the best ACR seen; 0 for an empty history."""
    if not history.records:
        return 0
    best = max(r.acr for r in history.records)
    threshold = CONVERGENCE_FRACTION * best if best >= 0 else best
    for record in history.records:
        if record.acr >= threshold:
            return record.step
    return history.records[-1].step


def gips(history: History) -> float:
    """Cost reduction per step up to convergence, measured from the pre-training cost."""
    steps = steps_to_converge(history)
    if steps == 0:
        return 0.0
    return (history.initial_cost - history.records[steps - 1].cost_after) / steps


def rps(history: History) -> float:
    """Seconds of training wall time per step to convergence."""
    steps = steps_to_converge(history)
    if steps == 0:
        return 0.0
    return sum(r.wall_ns for r in history.records) / 1e9 / steps


def active_trace(history: History) -> List[int]:
    return [len(r.active) for r in history.records]


def frozen_trace(history: History) -> List[int]:
    return [r.frozen for r in history.records]


def gmean(values: Sequence[float]) -> float:
    """Geometric mean; 0 if any value is 0, nan if any is negative."""
    values = [float(v) for v in values]
    if not values:
        return math.nan
    if len(values) == 1:
        return values[0]
    if any(v < 0 for v in values):
        return math.nan
    if any(v == 0 for v in values):
        return 0.0
    return float(np.exp(np.mean(np.log(values))))


def step_reduction(orbit_steps: float, ma_steps: float) -> float:
    """Percentage of steps saved relative to the multi-angle baseline."""
    if ma_steps <= 0:
        return math.nan
    return (ma_steps - orbit_steps) / ma_steps * 100.0


@dataclass(frozen=True)
class RunSummary:
    strategy: str
    final_acr: float
    steps: int
    total_steps: int
    rps: float
    gips: float
    status: str

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def summarize(history: History) -> RunSummary:
    return RunSummary(
        strategy=history.strategy,
        final_acr=history.final_acr,
        steps=steps_to_converge(history),
        total_steps=history.steps,
        rps=rps(history),
        gips=gips(history),
        status=history.status,
    )


def _mean_trace(traces: List[List[int]]) -> List[float]:
    """Per-step mean across runs; shorter runs hold their last value."""
    traces = [t for t in traces if t]
    if not traces:
        return []
    length = max(len(t) for t in traces)
    padded = np.array([t + [t[-1]] * (length - len(t)) for t in traces], dtype=float)
    return padded.mean(axis=0).tolist()


@dataclass
class Aggregate:
    runs: int
    acr: float
    steps: float
    rps: float
    gips: float
    acr_mean: float
    acr_std: float
    steps_mean: float
    steps_std: float
    active_trace: List[float] = field(default_factory=list)
    frozen_trace: List[float] = field(default_factory=list)

    def row(self) -> Dict[str, Any]:
        """Scalar columns only."""
        data = asdict(self)
        data.pop("active_trace")
        data.pop("frozen_trace")
        return data


def aggregate(histories: Sequence[History]) -> Optional[Aggregate]:
    """Geometric means of ACR, steps, RPS and GIPS across runs, plus mean layer traces."""
    if not histories:
        return None
    summaries = [summarize(h) for h in histories]
    acrs = [s.final_acr for s in summaries]
    steps = [float(s.steps) for s in summaries]
    return Aggregate(
        runs=len(histories),
        acr=gmean(acrs),
        steps=gmean(steps),
        rps=gmean([s.rps for s in summaries]),
        gips=gmean([s.gips for s in summaries]),
        acr_mean=float(np.mean(acrs)),
        acr_std=float(np.std(acrs)),
        steps_mean=float(np.mean(steps)),
        steps_std=float(np.std(steps)),
        active_trace=_mean_trace([active_trace(h) for h in histories]),
        frozen_trace=_mean_trace([frozen_trace(h) for h in histories]),
    )
