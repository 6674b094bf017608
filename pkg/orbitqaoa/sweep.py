"""Grid sweeps: one independent training run per cell, aggregated per group."""

from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from orbitqaoa.config import GraphModels, SweepSpec, build_run
from orbitqaoa.history import History
from orbitqaoa.metrics import aggregate, step_reduction, summarize
from orbitqaoa.report import ReportRenderer
from orbitqaoa.statevec import MAX_QUBITS
from orbitqaoa.trainer import train
from orbitqaoa.utils import ensure_directory

ERROR = "error"
SEED_AXES = ("seed", "graph_seed", "param_seed", "shot_seed", "order_seed")


@dataclass
class CellResult:
    index: int
    cell: Dict[str, Any]
    name: str
    status: str
    history: Optional[History] = None
    error: Optional[str] = None

    @property
    def cell_id(self) -> str:
        return f"cell-{self.index:04d}"

    @property
    def ok(self) -> bool:
        return self.status != ERROR


def run_cell(
    index: int,
    cell: Dict[str, Any],
    source: str,
    max_qubits: int = MAX_QUBITS,
    extra_models: Optional[GraphModels] = None,
) -> CellResult:
    """Train one cell; any failure is captured in the result instead of raised."""
    name = str(cell.get("name", f"cell-{index:04d}"))
    try:
        spec = build_run(
            cell, source=f"{source} [cell {index}]", extra_models=extra_models, max_qubits=max_qubits
        )
        history = train(spec.graph, spec.trainer)
        history.meta["run"] = spec.echo
        return CellResult(index, cell, spec.name, history.status, history)
    except Exception as e:
        return CellResult(index, cell, name, ERROR, error=f"{type(e).__name__}: {e}")


@dataclass
class SweepReport:
    spec: SweepSpec
    results: List[CellResult] = field(default_factory=list)

    @property
    def axis_names(self) -> List[str]:
        return [name for name, _ in self.spec.axes]

    @property
    def group_axes(self) -> List[str]:
        """Axes that define a group; seeds are repeated measurements inside a group."""
        return [name for name in self.axis_names if name not in SEED_AXES]

    @property
    def failed(self) -> List[CellResult]:
        return [r for r in self.results if not r.ok]

    def _key(self, cell: Dict[str, Any]) -> Tuple[Any, ...]:
        return tuple(cell.get(name) for name in self.group_axes)

    def groups(self) -> List[Tuple[Dict[str, Any], List[History]]]:
        grouped: Dict[Tuple[Any, ...], List[History]] = {}
        for result in self.results:
            if result.ok and result.history is not None:
                grouped.setdefault(self._key(result.cell), []).append(result.history)
        return [(dict(zip(self.group_axes, key)), runs) for key, runs in grouped.items()]

    def cell_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for result in self.results:
            row: Dict[str, Any] = {"cell": result.cell_id}
            row.update({name: result.cell.get(name) for name in self.axis_names})
            row["status"] = result.status
            if result.history is not None:
                row.update(summarize(result.history).to_dict())
                row.pop("strategy", None)
            row["error"] = result.error or ""
            rows.append(row)
        return rows

    def gmean_rows(self) -> List[Dict[str, Any]]:
        rows = []
        for key, runs in self.groups():
            summary = aggregate(runs)
            if summary is not None:
                rows.append({**key, **summary.row()})
        return rows

    def reduction_rows(self) -> List[Dict[str, Any]]:
        """Orbit against multi-angle training on otherwise equal groups."""
        if "strategy" not in self.group_axes:
            return []
        by_key = {}
        for row in self.gmean_rows():
            rest = tuple((k, row[k]) for k in self.group_axes if k != "strategy")
            by_key[(rest, row["strategy"])] = row
        rows = []
        for (rest, strategy), orbit in by_key.items():
            if strategy != "orbit" or (rest, "ma") not in by_key:
                continue
            ma = by_key[(rest, "ma")]
            rows.append(
                {
                    **dict(rest),
                    "orbit_steps": orbit["steps"],
                    "ma_steps": ma["steps"],
                    "orbit_acr": orbit["acr"],
                    "ma_acr": ma["acr"],
                    "reduced_steps_pct": step_reduction(orbit["steps"], ma["steps"]),
                }
            )
        return rows

    def curve_rows(self) -> List[Dict[str, Any]]:
        """Per-step ACR and layer counts of every finished cell, in long format."""
        rows = []
        for result in self.results:
            if result.history is None:
                continue
            for record in result.history.records:
                rows.append(
                    {
                        "cell": result.cell_id,
                        "step": record.step,
                        "acr": record.acr,
                        "acr_exact": "" if record.acr_exact is None else record.acr_exact,
                        "active": len(record.active),
                        "frozen": record.frozen,
                        "delta": record.delta,
                    }
                )
        return rows

    def trace_rows(self) -> List[Dict[str, Any]]:
        """Mean active and frozen layer counts per step for each group."""
        rows = []
        for key, runs in self.groups():
            summary = aggregate(runs)
            if summary is None:
                continue
            for step, (active, frozen) in enumerate(
                zip(summary.active_trace, summary.frozen_trace), start=1
            ):
                rows.append({**key, "step": step, "active": active, "frozen": frozen})
        return rows

    def write_histories(self, out_dir: Path) -> None:
        for result in self.results:
            if result.history is not None:
                result.history.save(out_dir / "cells" / result.cell_id)


CellCallback = Callable[[CellResult], None]


def run_sweep(
    spec: SweepSpec,
    workers: Optional[int] = None,
    max_qubits: int = MAX_QUBITS,
    extra_models: Optional[GraphModels] = None,
    on_cell: Optional[CellCallback] = None,
) -> SweepReport:
    """
    Run every cell of ``spec``.

    With more than one worker, cells run in a process pool; each cell builds
    its own graph, parameters and RNG streams from its seeds, so results do
    not depend on scheduling. Plugin graph models only run in-process.
    """
    cells = spec.cells()
    workers = workers or spec.workers
    results: List[CellResult] = []
    if workers <= 1 or len(cells) <= 1:
        for index, cell in enumerate(cells):
            result = run_cell(index, cell, spec.source, max_qubits, extra_models)
            results.append(result)
            if on_cell:
                on_cell(result)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(run_cell, index, cell, spec.source, max_qubits)
                for index, cell in enumerate(cells)
            ]
            for future in as_completed(futures):
                result = future.result()
                results.append(result)
                if on_cell:
                    on_cell(result)
    results.sort(key=lambda r: r.index)
    return SweepReport(spec, results)


def write_report(report: SweepReport, out_dir: Path, renderer: ReportRenderer) -> List[Path]:
    """Write the delimited tables, per-cell histories and the rendered report."""
    ensure_directory(out_dir)
    tables = {
        "cells.csv": report.cell_rows(),
        "gmean.csv": report.gmean_rows(),
        "reduction.csv": report.reduction_rows(),
        "curves.csv": report.curve_rows(),
        "traces.csv": report.trace_rows(),
    }
    written = []
    for name, rows in tables.items():
        path = out_dir / name
        renderer.write_rows(path, rows)
        written.append(path)
    report.write_histories(out_dir)
    path = out_dir / "report.md"
    renderer.render_to("sweep.md.j2", path, renderer.sweep_context(report))
    written.append(path)
    return written
