"""List command for orbitqaoa."""

import sys

import click
from rich.table import Table

from orbitqaoa.config import Config, parse_sweep
from orbitqaoa.utils import (
    ConfigError,
    console,
    print_error,
    print_header,
    print_info,
)


@click.command(name='list')
@click.option('--config', '-c', type=click.Path(exists=True), help='Path to orbitqaoa.yaml')
def list_experiments(config: str):
    """List available experiment configs."""
    try:
        cfg = Config(config_path=config)

        print_header("Available Experiments")

        experiments = cfg.list_experiments()

        if not experiments:
            print_info("No experiments found")
            print_info(f"Experiments directory: {cfg.get_experiments_dir()}")
            return

        table = Table(show_header=True, header_style="bold magenta")
        table.add_column("Experiment", style="cyan")
        table.add_column("Kind", style="white")
        table.add_column("Size", style="white", justify="right")
        table.add_column("Description", style="dim")

        for name in experiments:
            try:
                loaded = cfg.load_experiment(name)
            except ConfigError as e:
                table.add_row(name, "[red]invalid[/red]", "-", str(e))
                continue
            if loaded.is_sweep:
                try:
                    cells = len(parse_sweep(loaded.data, loaded.lines, str(loaded.path)).cells())
                    size = f"{cells} cells"
                except ConfigError as e:
                    table.add_row(name, "[red]invalid[/red]", "-", str(e))
                    continue
                kind = "sweep"
            else:
                kind = "train"
                size = str(loaded.data.get("strategy", "orbit"))
            table.add_row(name, kind, size, loaded.description or "-")

        console.print(table)
        console.print(f"\n[dim]Total: {len(experiments)} experiment(s)[/dim]")

    except ConfigError as e:
        print_error(f"Configuration error: {e}", indent=False)
        sys.exit(1)
    except Exception as e:
        print_error(f"Unexpected error: {e}", indent=False)
        sys.exit(1)
