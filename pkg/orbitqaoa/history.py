"""Per-step training records and their on-disk forms."""

import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple

import yaml

from orbitqaoa.ansatz import ParamSet
from orbitqaoa.utils import ExperimentError, ensure_directory

CONVERGED = "converged"
BUDGET_EXHAUSTED = "budget-exhausted"

HISTORY_FILE = "history.jsonl"
TABLE_FILE = "history.csv"
RUN_FILE = "run.yaml"
PARAMS_FILE = "params.yaml"


@dataclass(frozen=True)
class StepRecord:
    """
    One optimizer update.

    ``cost_before`` and ``cost_after`` are objective values (negated cut
    estimates), each from its own evaluation. ``active`` lists the layers still
    trainable after this step.
    """

    step: int
    epoch: int
    unit: str
    cost_before: float
    cost_after: float
    delta: float
    acr: float
    active: Tuple[int, ...]
    frozen: int
    wall_ns: int
    acr_exact: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["active"] = list(self.active)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StepRecord":
        if not isinstance(data, dict):
            raise ExperimentError(f"step record must be an object, got {type(data).__name__}")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ExperimentError(f"unknown step record fields: {sorted(unknown)}")
        data = dict(data)
        data["active"] = tuple(data.get("active", ()))
        return cls(**data)

    def comparable(self) -> Tuple[Any, ...]:
        """Every field except wall time, for reproducibility checks."""
        return tuple(
            getattr(self, f.name) for f in fields(self) if f.name != "wall_ns"
        )


@dataclass(eq=False)
class History:
    strategy: str
    p: int
    maxcut: float
    initial_cost: float
    records: List[StepRecord] = field(default_factory=list)
    status: str = CONVERGED
    params: Optional[ParamSet] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[StepRecord]:
        return iter(self.records)

    @property
    def steps(self) -> int:
        return len(self.records)

    @property
    def budget_exhausted(self) -> bool:
        return self.status == BUDGET_EXHAUSTED

    @property
    def final_acr(self) -> float:
        if not self.records:
            return -self.initial_cost / self.maxcut
        return self.records[-1].acr

    def comparable(self) -> List[Tuple[Any, ...]]:
        return [r.comparable() for r in self.records]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_dict()) + "\n" for r in self.records)

    def to_delimited(self, delimiter: str = ",") -> str:
        """Flat table; the active set is space separated in one column."""
        buffer = io.StringIO()
        names = [f.name for f in fields(StepRecord)]
        writer = csv.writer(buffer, delimiter=delimiter, lineterminator="\n")
        writer.writerow(names)
        for record in self.records:
            row = record.to_dict()
            row["active"] = " ".join(str(layer) for layer in record.active)
            if row["acr_exact"] is None:
                row["acr_exact"] = ""
            writer.writerow([row[name] for name in names])
        return buffer.getvalue()

    def run_info(self) -> Dict[str, Any]:
        return {
            "strategy": self.strategy,
            "p": self.p,
            "maxcut": self.maxcut,
            "initial_cost": self.initial_cost,
            "status": self.status,
            "steps": self.steps,
            **self.meta,
        }

    def save(self, directory: Path) -> List[Path]:
        """Write the history, its table, run info and (when known) final parameters."""
        ensure_directory(directory)
        written = []
        for name, content in (
            (HISTORY_FILE, self.to_jsonl()),
            (TABLE_FILE, self.to_delimited()),
            (RUN_FILE, yaml.safe_dump(self.run_info(), sort_keys=False)),
        ):
            path = directory / name
            path.write_text(content)
            written.append(path)
        if self.params is not None:
            path = directory / PARAMS_FILE
            path.write_text(yaml.safe_dump(self.params.to_mapping(), sort_keys=False))
            written.append(path)
        return written

    @classmethod
    def load(cls, directory: Path) -> "History":
        """Read a run directory written by :meth:`save`."""
        run_path = directory / RUN_FILE
        history_path = directory / HISTORY_FILE
        if not run_path.exists() or not history_path.exists():
            raise ExperimentError(f"{directory} is not a run directory")
        try:
            info = yaml.safe_load(run_path.read_text()) or {}
        except yaml.YAMLError as e:
            raise ExperimentError(f"failed to parse {run_path}: {e}")
        records = []
        for number, line in enumerate(history_path.read_text().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                records.append(StepRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, TypeError, AttributeError, ExperimentError) as e:
                raise ExperimentError(f"{history_path}:{number}: {e}")
        params = None
        params_path = directory / PARAMS_FILE
        if params_path.exists():
            params = ParamSet.from_mapping(yaml.safe_load(params_path.read_text()))
        core = {"strategy", "p", "maxcut", "initial_cost", "status", "steps"}
        try:
            return cls(
                strategy=info["strategy"],
                p=int(info["p"]),
                maxcut=float(info["maxcut"]),
                initial_cost=float(info["initial_cost"]),
                records=records,
                status=info.get("status", CONVERGED),
                params=params,
                meta={k: v for k, v in info.items() if k not in core},
            )
        except KeyError as e:
            raise ExperimentError(f"{run_path} is missing {e}")
