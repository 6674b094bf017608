"""Sweep command for orbitqaoa."""

import sys
from pathlib import Path
from typing import Optional

import click
from rich.table import Table

from orbitqaoa.config import Config, parse_sweep
from orbitqaoa.report import ReportRenderer
from orbitqaoa.sweep import CellResult, run_sweep, write_report
from orbitqaoa.utils import (
    ConfigError,
    OrbitError,
    console,
    print_error,
    print_header,
    print_info,
    print_step,
    print_success,
    print_warning,
)


@click.command()
@click.argument('experiment')
@click.option('--config', '-c', type=click.Path(exists=True), help='Path to orbitqaoa.yaml')
@click.option('--workers', '-w', type=int, help='Worker processes (overrides the file)')
@click.option('--out', '-o', type=click.Path(file_okay=False), help='Output directory')
@click.pass_context
def sweep(ctx, experiment: str, config: str, workers: Optional[int], out: Optional[str]):
    """Run every cell of a sweep grid and aggregate the results."""
    try:
        cfg = Config(config_path=config)
        plugin_manager = ctx.obj.get('plugin_manager') if ctx.obj else None

        loaded = cfg.load_experiment(experiment)
        if not loaded.is_sweep:
            raise ConfigError(f"{loaded.path} has no 'grid'; use 'orbitqaoa train'")
        spec = parse_sweep(loaded.data, loaded.lines, str(loaded.path))
        cells = spec.cells()

        print_header(f"Sweep {spec.name}")
        print_info(f"{len(cells)} cell(s), {workers or spec.workers} worker(s)")

        total = len(cells)

        def on_cell(result: CellResult) -> None:
            label = f"[{result.index + 1}/{total}] {result.name}"
            if not result.ok:
                print_error(f"{label}: {result.error}")
            elif result.history is not None and result.history.budget_exhausted:
                print_warning(f"{label}: budget exhausted")
            else:
                acr = result.history.final_acr if result.history else float("nan")
                print_success(f"{label}: acr={acr:.4f} steps={result.history.steps if result.history else 0}")

        if cells:
            print_step("Running cells")
        report = run_sweep(
            spec,
            workers=workers,
            max_qubits=cfg.max_qubits,
            extra_models=plugin_manager.get_graph_models() if plugin_manager else None,
            on_cell=on_cell,
        )

        out_dir = Path(out) if out else cfg.get_output_dir() / spec.name
        renderer = ReportRenderer(
            extra_filters=plugin_manager.get_report_filters() if plugin_manager else None
        )
        write_report(report, out_dir, renderer)

        rows = report.gmean_rows()
        if rows:
            table = Table(show_header=True, header_style="bold magenta")
            for axis in report.group_axes:
                table.add_column(axis, style="cyan")
            for column in ("runs", "ACR", "steps", "GIPS"):
                table.add_column(column, justify="right")
            for row in rows:
                table.add_row(
                    *[str(row[axis]) for axis in report.group_axes],
                    str(row["runs"]),
                    f"{row['acr']:.4f}",
                    f"{row['steps']:.1f}",
                    f"{row['gips']:.4f}",
                )
            console.print(table)
        else:
            print_info("Nothing to aggregate")

        print_info(f"Output: {out_dir}")
        if report.failed:
            print_error(f"{len(report.failed)} of {total} cell(s) failed", indent=False)
            sys.exit(1)
        print_success(f"Sweep complete: {total} cell(s)", indent=False)

    except ConfigError as e:
        print_error(f"Configuration error: {e}", indent=False)
        sys.exit(1)
    except OrbitError as e:
        print_error(f"Sweep failed: {e}", indent=False)
        sys.exit(1)
    except Exception as e:
        print_error(f"Unexpected error: {e}", indent=False)
        sys.exit(1)
