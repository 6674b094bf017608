"""Tests for grid sweeps and their reports."""

import csv

import pytest

from orbitqaoa.config import SweepSpec
from orbitqaoa.history import History
from orbitqaoa.report import ReportRenderer
from orbitqaoa.sweep import ERROR, run_cell, run_sweep, write_report

BASE = {"model": "path", "n": 4, "p": 2, "shots": None, "epsilon": 1e-4, "max_steps": 30}


def small_sweep(**overrides) -> SweepSpec:
    options = {
        "name": "small",
        "base": dict(BASE),
        "axes": [("strategy", ["ma", "orbit"]), ("seed", [1, 2])],
        "source": "small.yaml",
    }
    options.update(overrides)
    return SweepSpec(**options)


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class TestRunCell:
    def test_success(self):
        result = run_cell(0, {**BASE, "strategy": "orbit"}, "cell.yaml")
        assert result.ok
        assert result.cell_id == "cell-0000"
        assert result.history.strategy == "orbit"
        assert result.history.meta["run"]["source"] == "cell.yaml [cell 0]"

    def test_failure_is_captured(self):
        result = run_cell(3, {**BASE, "model": "lattice"}, "cell.yaml")
        assert result.status == ERROR
        assert not result.ok
        assert "lattice" in result.error


class TestRunSweep:
    def test_groups_over_non_seed_axes(self):
        report = run_sweep(small_sweep())
        assert len(report.results) == 4
        assert not report.failed
        assert report.group_axes == ["strategy"]
        rows = report.gmean_rows()
        assert [row["strategy"] for row in rows] == ["ma", "orbit"]
        assert all(row["runs"] == 2 for row in rows)
        reduction = report.reduction_rows()
        assert len(reduction) == 1
        assert set(reduction[0]) >= {"orbit_steps", "ma_steps", "reduced_steps_pct"}

    def test_empty_grid(self):
        report = run_sweep(small_sweep(axes=[]))
        assert report.results == []
        assert report.gmean_rows() == []

    def test_process_pool_matches_sequential(self):
        spec = small_sweep(axes=[("seed", [1, 2, 3])])
        sequential = run_sweep(spec, workers=1)
        pooled = run_sweep(spec, workers=2)
        assert [r.index for r in pooled.results] == [0, 1, 2]
        for a, b in zip(sequential.results, pooled.results):
            assert a.history.comparable() == b.history.comparable()

    def test_callback_sees_every_cell(self):
        seen = []
        run_sweep(small_sweep(), on_cell=seen.append)
        assert sorted(r.index for r in seen) == [0, 1, 2, 3]

    def test_failed_cells_are_reported(self):
        spec = small_sweep(axes=[("model", ["path", "lattice"])])
        report = run_sweep(spec)
        assert len(report.failed) == 1
        assert report.cell_rows()[1]["status"] == ERROR


class TestWriteReport:
    def test_outputs(self, tmp_path):
        report = run_sweep(small_sweep())
        write_report(report, tmp_path, ReportRenderer())
        for name in ("cells.csv", "gmean.csv", "reduction.csv", "curves.csv", "traces.csv", "report.md"):
            assert (tmp_path / name).exists()
        cells = read_csv(tmp_path / "cells.csv")
        assert [row["cell"] for row in cells] == ["cell-0000", "cell-0001", "cell-0002", "cell-0003"]
        assert len(read_csv(tmp_path / "gmean.csv")) == 2
        history = History.load(tmp_path / "cells" / "cell-0002")
        assert history.strategy == "orbit"
        text = (tmp_path / "report.md").read_text()
        assert "# Sweep: small" in text
        assert "Orbit against MA" in text

    def test_empty_grid_report(self, tmp_path):
        write_report(run_sweep(small_sweep(axes=[])), tmp_path, ReportRenderer())
        assert "the grid is empty" in (tmp_path / "report.md").read_text()
        assert (tmp_path / "cells.csv").read_text().strip() == ""

    def test_failed_cells_listed(self, tmp_path):
        report = run_sweep(small_sweep(axes=[("model", ["path", "lattice"])]))
        write_report(report, tmp_path, ReportRenderer())
        assert "## Failed cells" in (tmp_path / "report.md").read_text()


class TestRenderer:
    def test_filters(self):
        renderer = ReportRenderer()
        assert renderer._ratio_filter(0.5) == "0.5000"
        assert renderer._ratio_filter(float("nan")) == "-"
        assert renderer._num_filter(3) == "3"
        assert renderer._seconds_filter(0.002) == "2.00ms"
        assert renderer._pct_filter(25.5) == "25.50%"

    def test_extra_filters(self, tmp_path):
        (tmp_path / "t.j2").write_text("{{ value | shout }}")
        renderer = ReportRenderer(templates_dir=tmp_path, extra_filters={"shout": str.upper})
        assert renderer.render("t.j2", {"value": "acr"}) == "ACR"

    def test_undefined_variables_fail(self, tmp_path):
        from orbitqaoa.utils import ReportError

        (tmp_path / "t.j2").write_text("{{ missing }}")
        with pytest.raises(ReportError):
            ReportRenderer(templates_dir=tmp_path).render("t.j2", {})
