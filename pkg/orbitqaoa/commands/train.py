"""Train command for orbitqaoa."""

import sys
from pathlib import Path
from typing import Any, Dict, Optional

import click

from orbitqaoa.config import CHOICES, Config, build_run, flatten_run
from orbitqaoa.graph import brute_force_maxcut
from orbitqaoa.history import StepRecord
from orbitqaoa.metrics import summarize
from orbitqaoa.report import ReportRenderer
from orbitqaoa.trainer import Trainer
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

EXIT_BUDGET_EXHAUSTED = 2
SUMMARY_FILE = "summary.txt"


@click.command()
@click.argument('experiment', required=False)
@click.option('--config', '-c', type=click.Path(exists=True), help='Path to orbitqaoa.yaml')
@click.option('--model', '-m', help='Graph model')
@click.option('--n', '-n', 'n', type=int, help='Number of nodes')
@click.option('--graph-file', '-g', type=click.Path(exists=True, dir_okay=False), help='Graph text file')
@click.option('--seed', '-s', type=int, help='Default for every seed')
@click.option('--strategy', type=click.Choice(CHOICES["strategy"]), help='Training strategy')
@click.option('--p', '-p', 'p', type=int, help='Number of QAOA layers')
@click.option('--eps', type=float, help='Activeness threshold epsilon')
@click.option('--shots', type=int, help='Shots per evaluation (0 for analytic)')
@click.option('--analytic', is_flag=True, help='Exact expectations instead of shots')
@click.option('--mixer', type=click.Choice(CHOICES["mixer"]), help='Mixer Hamiltonian')
@click.option('--layout', type=click.Choice(CHOICES["layout"]), help='Parameter layout')
@click.option('--order', type=click.Choice(CHOICES["order"]), help='Layer visiting order')
@click.option('--order-seed', type=int, help='Seed for random layer order')
@click.option('--lma-steps', type=int, help='Steps per stage for lma/lsa')
@click.option('--max-steps', type=int, help='Step budget')
@click.option('--k', 'k', type=float, help='Sublayer granularity (0.5, 1, 2, 3)')
@click.option('--parallel', is_flag=True, default=None, help='Parallel half-layer updates (sublayer, k=2)')
@click.option('--param-seed', type=int, help='Seed for initial angles')
@click.option('--shot-seed', type=int, help='Seed for shot sampling')
@click.option('--lr', type=float, help='AdaGrad learning rate')
@click.option('--name', help='Run name (output subdirectory)')
@click.option('--out', '-o', type=click.Path(file_okay=False), help='Output directory')
@click.option('--quiet', '-q', is_flag=True, help='Suppress per-step progress')
@click.pass_context
def train(ctx, experiment: Optional[str], config: str, quiet: bool, out: Optional[str], **flags):
    """
    Train a QAOA circuit.

    EXPERIMENT names a file in the experiments directory (or a path); command
    line flags override its values.
    """
    try:
        cfg = Config(config_path=config)
        plugin_manager = ctx.obj.get('plugin_manager') if ctx.obj else None
        extra_models = plugin_manager.get_graph_models() if plugin_manager else {}

        if experiment:
            loaded = cfg.load_experiment(experiment)
            if loaded.is_sweep:
                raise ConfigError(f"{loaded.path} is a sweep; use 'orbitqaoa sweep'")
            data, lines, source = loaded.data, loaded.lines, str(loaded.path)
            base_dir = loaded.path.parent
        else:
            data, lines, source, base_dir = dict(cfg.get_defaults()), {}, "<command line>", None
        data, lines = flatten_run(data, lines, source)
        data.update(_overrides(flags, data))

        spec = build_run(
            data,
            lines,
            source,
            extra_models=extra_models,
            max_qubits=cfg.max_qubits,
            base_dir=base_dir,
        )
        trainer_cfg = spec.trainer

        print_header(f"Training {spec.name}")
        print_info(
            f"{trainer_cfg.strategy.value} | n={spec.graph.n} m={spec.graph.m} | p={trainer_cfg.p} "
            f"| {trainer_cfg.eval} | epsilon={trainer_cfg.epsilon:g}"
        )

        if plugin_manager:
            plugin_manager.call_hook('orbitqaoa_pre_train', graph=spec.graph, config=trainer_cfg)

        print_step("Solving Max-Cut exactly")
        maxcut = brute_force_maxcut(spec.graph, max_nodes=cfg.max_bruteforce_nodes).max_value
        print_info(f"maxcut: {maxcut:g}")

        def on_step(record: StepRecord) -> None:
            if not quiet:
                console.print(
                    f"  [dim]{record.step:>5}[/dim] {record.unit:<18} "
                    f"acr={record.acr:.4f}  dC={record.delta:+.6f}  active={len(record.active)}"
                )
            if plugin_manager:
                plugin_manager.call_hook('orbitqaoa_post_step', record=record)

        print_step("Training")
        history = Trainer(spec.graph, trainer_cfg, maxcut=maxcut, on_step=on_step).run()
        history.meta["run"] = spec.echo
        summary = summarize(history)

        out_dir = Path(out) if out else cfg.get_output_dir() / spec.name
        history.save(out_dir)
        renderer = ReportRenderer(
            extra_filters=plugin_manager.get_report_filters() if plugin_manager else None
        )
        text = renderer.render_to("summary.txt.j2", out_dir / SUMMARY_FILE,
                                  renderer.summary_context(spec.name, history, summary))

        if plugin_manager:
            plugin_manager.call_hook('orbitqaoa_post_train', history=history, summary=summary)

        console.print()
        console.print(text, highlight=False, markup=False)
        print_info(f"Output: {out_dir}")

        if history.budget_exhausted:
            print_warning(f"Step budget of {trainer_cfg.max_steps} exhausted before convergence", indent=False)
            sys.exit(EXIT_BUDGET_EXHAUSTED)
        print_success(f"Converged after {history.steps} step(s)", indent=False)

    except ConfigError as e:
        print_error(f"Configuration error: {e}", indent=False)
        sys.exit(1)
    except OrbitError as e:
        print_error(f"Training failed: {e}", indent=False)
        sys.exit(1)
    except Exception as e:
        print_error(f"Unexpected error: {e}", indent=False)
        sys.exit(1)


# click option name -> experiment key
_FLAG_KEYS = {
    "model": "model",
    "n": "n",
    "graph_file": "graph_file",
    "seed": "seed",
    "strategy": "strategy",
    "p": "p",
    "eps": "epsilon",
    "shots": "shots",
    "mixer": "mixer",
    "layout": "layout",
    "order": "order",
    "order_seed": "order_seed",
    "lma_steps": "lma_steps",
    "max_steps": "max_steps",
    "k": "k",
    "parallel": "parallel",
    "param_seed": "param_seed",
    "shot_seed": "shot_seed",
    "lr": "lr",
    "name": "name",
}


def _overrides(flags: Dict[str, Any], data: Dict[str, Any]) -> Dict[str, Any]:
    """Experiment keys set on the command line; an explicit epsilon replaces a per-shot one."""
    overrides = {
        key: flags[flag]
        for flag, key in _FLAG_KEYS.items()
        if flags.get(flag) is not None
    }
    if flags.get("analytic"):
        overrides["shots"] = None
    if "epsilon" in overrides:
        data.pop("epsilon_per_shot", None)
    if "graph_file" in overrides:
        overrides["graph_file"] = str(Path(overrides["graph_file"]).resolve())
        data.pop("model", None)
    return overrides
