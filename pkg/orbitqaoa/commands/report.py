"""Report command for orbitqaoa."""

import sys
from pathlib import Path
from typing import List, Optional, Tuple

import click
from rich.table import Table

from orbitqaoa.history import RUN_FILE, History
from orbitqaoa.metrics import aggregate, summarize
from orbitqaoa.report import ReportRenderer
from orbitqaoa.utils import (
    ExperimentError,
    console,
    print_error,
    print_header,
    print_info,
    print_success,
)


def _find_runs(paths: Tuple[str, ...]) -> List[Path]:
    """Run directories among ``paths`` or anywhere beneath them."""
    runs: List[Path] = []
    for raw in paths:
        path = Path(raw)
        if (path / RUN_FILE).exists():
            runs.append(path)
        else:
            runs.extend(sorted(p.parent for p in path.rglob(RUN_FILE)))
    return runs


def _status_cell(status: str) -> str:
    style = "green" if status == "converged" else "yellow"
    return f"[{style}]{status}[/{style}]"


@click.command()
@click.argument('paths', nargs=-1, required=True, type=click.Path(exists=True, file_okay=False))
@click.option('--csv', 'csv_path', type=click.Path(dir_okay=False), help='Also write the table as CSV')
def report(paths: Tuple[str, ...], csv_path: Optional[str]):
    """Summarize finished runs (run directories or folders containing them)."""
    try:
        runs = _find_runs(paths)
        print_header("Run Report")

        if not runs:
            print_info("No runs found")
            return

        histories = [History.load(run) for run in runs]

        table = Table(show_header=True, header_style="bold magenta")
        table.add_column("Run", style="cyan")
        table.add_column("Strategy", style="white")
        table.add_column("Status", style="white")
        table.add_column("Final ACR", justify="right")
        table.add_column("Steps", justify="right")
        table.add_column("Total", justify="right", style="dim")
        table.add_column("RPS (s)", justify="right")
        table.add_column("GIPS", justify="right")

        rows = []
        for run, history in zip(runs, histories):
            summary = summarize(history)
            rows.append({"run": str(run), **summary.to_dict()})
            table.add_row(
                run.name,
                summary.strategy,
                _status_cell(summary.status),
                f"{summary.final_acr:.4f}",
                str(summary.steps),
                str(summary.total_steps),
                f"{summary.rps:.4f}",
                f"{summary.gips:.4f}",
            )

        combined = aggregate(histories)
        if combined is not None and combined.runs > 1:
            table.add_row(
                "[bold]gmean[/bold]", "", "",
                f"{combined.acr:.4f}", f"{combined.steps:.1f}", "",
                f"{combined.rps:.4f}", f"{combined.gips:.4f}",
            )

        console.print(table)

        if csv_path:
            ReportRenderer.write_rows(Path(csv_path), rows)
            print_success(f"Wrote {csv_path}")

    except ExperimentError as e:
        print_error(f"Cannot read run: {e}", indent=False)
        sys.exit(1)
    except Exception as e:
        print_error(f"Unexpected error: {e}", indent=False)
        sys.exit(1)
