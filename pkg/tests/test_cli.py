"""End-to-end tests for the command-line interface."""

import pytest
from click.testing import CliRunner

from orbitqaoa import __version__
from orbitqaoa.cli import cli
from orbitqaoa.config import CONFIG_ENV_VAR
from orbitqaoa.history import History

from conftest import write_yaml

PLUGIN = '''
import click

from orbitqaoa.graph import Graph
from orbitqaoa.plugins import hookimpl

STEPS = []


class OrbitPlugin:
    @hookimpl
    def orbitqaoa_graph_models(self):
        return {"ring": lambda n, seed, **params: Graph(n, tuple((i, (i + 1) % n, 1.0) for i in range(n)))}

    @hookimpl
    def orbitqaoa_add_commands(self):
        @click.command()
        def hello():
            click.echo("hello from a plugin")

        return {"hello": hello}

    @hookimpl
    def orbitqaoa_post_step(self, record):
        STEPS.append(record.step)
'''


@pytest.fixture
def workspace(tmp_path, monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def invoke(*args):
    return CliRunner().invoke(cli, list(args), obj={})


class TestGenerate:
    def test_path(self, workspace):
        result = invoke("generate", "-m", "path", "-n", "5", "-o", "p5.graph")
        assert result.exit_code == 0, result.output
        assert "maxcut: 4" in result.output
        assert (workspace / "p5.graph").read_text().splitlines()[0] == "5 4"

    def test_complete_graph(self, workspace):
        result = invoke("generate", "-m", "sk", "-n", "6")
        assert result.exit_code == 0, result.output
        assert (workspace / "sk-6-s0.graph").read_text().splitlines()[0] == "6 15"

    def test_same_seed_same_file(self, workspace):
        for out in ("a.graph", "b.graph"):
            invoke("generate", "-m", "ws", "-n", "8", "-s", "3", "-P", "k_ring=2", "-o", out)
        assert (workspace / "a.graph").read_text() == (workspace / "b.graph").read_text()

    def test_bad_parameter(self, workspace):
        result = invoke("generate", "-m", "er", "-n", "6", "-P", "prob=2")
        assert result.exit_code == 1


class TestTrain:
    def test_huge_epsilon(self, workspace):
        result = invoke(
            "train", "--model", "pl", "-n", "6", "-p", "3", "--analytic", "--eps", "1e9",
            "--out", "run",
        )
        assert result.exit_code == 0, result.output
        history = History.load(workspace / "run")
        assert history.steps == 3
        assert (workspace / "run" / "summary.txt").exists()
        assert "final ACR" in result.output

    def test_budget_exhausted(self, workspace):
        result = invoke(
            "train", "--model", "pl", "-n", "6", "-p", "2", "--analytic", "--eps", "1e-12",
            "--max-steps", "3", "--quiet", "--out", "run",
        )
        assert result.exit_code == 2
        assert History.load(workspace / "run").budget_exhausted

    def test_experiment_file_with_overrides(self, workspace):
        write_yaml(workspace / "exp.yaml", """
graph:
  model: path
  n: 4
strategy: lma
p: 2
lma_steps: 3
shots: 64
""")
        result = invoke("train", "exp.yaml", "--shots", "32", "--name", "short", "-q")
        assert result.exit_code == 0, result.output
        history = History.load(workspace / "runs" / "short")
        assert history.steps == 6
        assert history.meta["config"]["shots"] == 32

    def test_config_error_names_the_line(self, workspace):
        write_yaml(workspace / "bad.yaml", "model: pl\nn: 6\np: five\n")
        result = invoke("train", "bad.yaml")
        assert result.exit_code == 1
        assert "bad.yaml:3" in result.output

    def test_sweep_file_is_rejected(self, workspace):
        write_yaml(workspace / "grid.yaml", "grid:\n  p: [1]\n")
        assert invoke("train", "grid.yaml").exit_code == 1


class TestSweep:
    def test_empty_grid(self, workspace):
        write_yaml(workspace / "empty.yaml", "base:\n  model: pl\n  n: 6\ngrid: {}\n")
        result = invoke("sweep", "empty.yaml", "--out", "out")
        assert result.exit_code == 0, result.output
        assert (workspace / "out" / "report.md").exists()

    def test_small_grid(self, workspace):
        write_yaml(workspace / "grid.yaml", """
base:
  model: path
  n: 4
  p: 2
  shots: 0
  max_steps: 20
grid:
  strategy: [ma, orbit]
""")
        result = invoke("sweep", "grid.yaml", "--out", "out")
        assert result.exit_code == 0, result.output
        assert (workspace / "out" / "gmean.csv").exists()
        assert (workspace / "out" / "cells" / "cell-0001" / "history.jsonl").exists()

    def test_failed_cell_exits_nonzero(self, workspace):
        write_yaml(workspace / "grid.yaml", "base:\n  n: 4\n  shots: 0\ngrid:\n  model: [path, lattice]\n")
        result = invoke("sweep", "grid.yaml", "--out", "out")
        assert result.exit_code == 1
        assert (workspace / "out" / "cells.csv").exists()


class TestListAndReport:
    def test_list(self, workspace):
        (workspace / "experiments").mkdir()
        write_yaml(workspace / "experiments" / "demo.yaml", "description: a demo\nmodel: pl\nn: 6\n")
        result = invoke("list")
        assert result.exit_code == 0, result.output
        assert "demo" in result.output
        assert "Total: 1" in result.output

    def test_list_without_experiments(self, workspace):
        result = invoke("list")
        assert result.exit_code == 0
        assert "No experiments found" in result.output

    def test_report(self, workspace):
        for seed in ("1", "2"):
            invoke(
                "train", "--model", "pl", "-n", "6", "-p", "2", "--analytic", "--eps", "1e9",
                "--param-seed", seed, "--out", f"runs/s{seed}",
            )
        result = invoke("report", "runs", "--csv", "summary.csv")
        assert result.exit_code == 0, result.output
        assert "gmean" in result.output
        assert len((workspace / "summary.csv").read_text().splitlines()) == 3

    def test_report_without_runs(self, workspace):
        (workspace / "empty").mkdir()
        result = invoke("report", "empty")
        assert result.exit_code == 0
        assert "No runs found" in result.output


class TestPlugins:
    @pytest.fixture
    def plugin_dir(self, workspace):
        directory = workspace / "extras"
        directory.mkdir()
        (directory / "ring_plugin.py").write_text(PLUGIN)
        return directory

    def test_plugin_graph_model(self, workspace, plugin_dir):
        result = invoke("--plugins-dir", str(plugin_dir), "generate", "-m", "ring", "-n", "6", "-o", "ring.graph")
        assert result.exit_code == 0, result.output
        assert "maxcut: 6" in result.output

    def test_plugin_command(self, plugin_dir):
        result = invoke("--plugins-dir", str(plugin_dir), "hello")
        assert result.exit_code == 0, result.output
        assert "hello from a plugin" in result.output

    def test_post_step_hook(self, workspace, plugin_dir):
        import sys

        result = invoke(
            "--plugins-dir", str(plugin_dir), "train", "--model", "ring", "-n", "4", "-p", "2",
            "--analytic", "--eps", "1e9", "--out", "run",
        )
        assert result.exit_code == 0, result.output
        assert sys.modules["ring_plugin"].STEPS[-2:] == [1, 2]


def test_version():
    result = invoke("--version")
    assert result.exit_code == 0
    assert __version__ in result.output
