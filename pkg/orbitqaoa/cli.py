"""Main CLI for orbitqaoa."""

import sys
from pathlib import Path
from typing import Optional

import click

from orbitqaoa import __version__
from orbitqaoa.commands import generate, list_experiments, report, sweep, train
from orbitqaoa.plugins import PluginManager
from orbitqaoa.utils import find_project_root, print_error


def _plugin_manager(ctx: click.Context) -> PluginManager:
    """Load plugins once per invocation and keep the manager on ``ctx.obj``."""
    ctx.ensure_object(dict)
    if 'plugin_manager' in ctx.obj:
        return ctx.obj['plugin_manager']

    plugin_dirs = []
    plugins_dir = ctx.params.get('plugins_dir')
    if plugins_dir:
        plugin_dirs.append(Path(plugins_dir))

    project_root = find_project_root()
    if project_root:
        local_plugins = project_root / "plugins"
        if local_plugins.exists():
            plugin_dirs.append(local_plugins)

    builtin_plugins = Path(__file__).parent.parent / "plugins"
    if builtin_plugins.exists() and builtin_plugins not in plugin_dirs:
        plugin_dirs.append(builtin_plugins)

    plugin_manager = PluginManager(plugin_dirs)
    plugin_manager.load_plugins()
    ctx.obj['plugin_manager'] = plugin_manager
    return plugin_manager


class OrbitGroup(click.Group):
    """Command group that falls back to commands contributed by plugins."""

    def get_command(self, ctx: click.Context, cmd_name: str) -> Optional[click.Command]:
        command = super().get_command(ctx, cmd_name)
        if command is None:
            command = _plugin_manager(ctx).get_custom_commands().get(cmd_name)
        return command


@click.group(cls=OrbitGroup)
@click.version_option(version=__version__, prog_name='orbitqaoa')
@click.option('--plugins-dir', type=click.Path(exists=True), help='Path to plugins directory')
@click.pass_context
def cli(ctx, plugins_dir: str):
    """
    orbitqaoa - layerwise QAOA training workbench for Max-Cut.

    Generates graph instances, trains multi-angle and single-angle QAOA
    circuits with round-robin layer freezing and baseline strategies on an
    exact state-vector simulator, and sweeps experiment grids.
    """
    _plugin_manager(ctx)


cli.add_command(generate)
cli.add_command(list_experiments)
cli.add_command(report)
cli.add_command(sweep)
cli.add_command(train)


def main():
    """Main entry point for orbitqaoa CLI."""
    try:
        cli(obj={})
    except KeyboardInterrupt:
        print_error("\nInterrupted by user", indent=False)
        sys.exit(130)
    except Exception as e:
        print_error(f"Fatal error: {e}", indent=False)
        sys.exit(1)


if __name__ == '__main__':
    main()
