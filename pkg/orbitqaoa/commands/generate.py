"""Generate command for orbitqaoa."""

import sys
from pathlib import Path
from typing import Any, Dict, Tuple

import click
import yaml

from orbitqaoa.config import Config
from orbitqaoa.graph import brute_force_maxcut, generate as generate_graph
from orbitqaoa.utils import (
    ConfigError,
    OrbitError,
    SizeLimitError,
    print_error,
    print_header,
    print_info,
    print_success,
    print_warning,
)


def _parse_params(pairs: Tuple[str, ...]) -> Dict[str, Any]:
    """Turn ``key=value`` options into typed model parameters."""
    params: Dict[str, Any] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise click.BadParameter(f"expected key=value, got {pair!r}", param_hint="--param")
        params[key.strip()] = yaml.safe_load(value)
    return params


@click.command()
@click.option('--model', '-m', required=True, help='Graph model (path, er, ra, ba, bb, ws, pl, sk)')
@click.option('--n', '-n', 'n', type=int, required=True, help='Number of nodes')
@click.option('--seed', '-s', type=int, default=0, show_default=True, help='Generator seed')
@click.option('--param', '-P', 'params', multiple=True, help='Model parameter as key=value, e.g. prob=0.5')
@click.option('--out', '-o', type=click.Path(dir_okay=False), help='Output file (default: <model>-<n>-s<seed>.graph)')
@click.option('--config', '-c', type=click.Path(exists=True), help='Path to orbitqaoa.yaml')
@click.pass_context
def generate(ctx, model: str, n: int, seed: int, params: Tuple[str, ...], out: str, config: str):
    """Generate a graph instance and report its exact Max-Cut."""
    try:
        cfg = Config(config_path=config)
        plugin_manager = ctx.obj.get('plugin_manager') if ctx.obj else None
        extra_models = plugin_manager.get_graph_models() if plugin_manager else {}

        print_header(f"Generating {model} graph")

        graph = generate_graph(model, n, seed=seed, extra_models=extra_models, **_parse_params(params))
        out_path = Path(out) if out else Path(f"{model}-{n}-s{seed}.graph")
        graph.save(out_path)

        print_success(f"Wrote {out_path}")
        print_info(f"n: {graph.n}")
        print_info(f"m: {graph.m}")
        try:
            result = brute_force_maxcut(graph, max_nodes=cfg.max_bruteforce_nodes)
            print_info(f"maxcut: {result.max_value:g}")
        except SizeLimitError as e:
            print_warning(f"maxcut skipped: {e}")

    except ConfigError as e:
        print_error(f"Configuration error: {e}", indent=False)
        sys.exit(1)
    except OrbitError as e:
        print_error(f"Generation failed: {e}", indent=False)
        sys.exit(1)
    except TypeError as e:
        print_error(f"Invalid model parameters: {e}", indent=False)
        sys.exit(1)
