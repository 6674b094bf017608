"""Summary and sweep report rendering."""

import csv
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import jinja2

from orbitqaoa.history import History
from orbitqaoa.metrics import RunSummary
from orbitqaoa.utils import ReportError, ensure_directory

TEMPLATES_DIR = Path(__file__).parent / "templates"


class ReportRenderer:
    """Renders run summaries and sweep reports with Jinja2."""

    def __init__(
        self,
        templates_dir: Optional[Path] = None,
        extra_filters: Optional[Dict[str, Callable]] = None,
    ):
        """
        Initialize renderer.

        Args:
            templates_dir: Directory holding ``*.j2`` templates (package templates by default)
            extra_filters: Additional Jinja2 filters, usually from plugins
        """
        self.templates_dir = templates_dir or TEMPLATES_DIR
        self._env = self._get_jinja_env(extra_filters or {})

    def _get_jinja_env(self, extra_filters: Dict[str, Callable]) -> jinja2.Environment:
        env = jinja2.Environment(
            loader=jinja2.FileSystemLoader(str(self.templates_dir)),
            autoescape=False,
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
            undefined=jinja2.StrictUndefined,
        )
        env.filters["ratio"] = self._ratio_filter
        env.filters["num"] = self._num_filter
        env.filters["pct"] = self._pct_filter
        env.filters["seconds"] = self._seconds_filter
        env.filters.update(extra_filters)
        return env

    @staticmethod
    def _ratio_filter(value: Any) -> str:
        if value is None or (isinstance(value, float) and math.isnan(value)):
            return "-"
        return f"{value:.4f}"

    @staticmethod
    def _num_filter(value: Any, digits: int = 2) -> str:
        if value is None or (isinstance(value, float) and math.isnan(value)):
            return "-"
        if isinstance(value, int):
            return str(value)
        return f"{value:.{digits}f}"

    @staticmethod
    def _pct_filter(value: Any) -> str:
        if value is None or (isinstance(value, float) and math.isnan(value)):
            return "-"
        return f"{value:.2f}%"

    @staticmethod
    def _seconds_filter(value: Any) -> str:
        if value is None:
            return "-"
        if value < 1e-3:
            return f"{value * 1e6:.1f}us"
        if value < 1:
            return f"{value * 1e3:.2f}ms"
        return f"{value:.3f}s"

    def render(self, template_name: str, context: Dict[str, Any]) -> str:
        """
        Render a template to a string.

        Args:
            template_name: Template file name inside the templates directory
            context: Template context variables

        Returns:
            Rendered text
        """
        try:
            return self._env.get_template(template_name).render(**context)
        except jinja2.TemplateError as e:
            raise ReportError(f"Failed to render template {template_name}: {e}")

    def render_to(self, template_name: str, output_path: Path, context: Dict[str, Any]) -> str:
        rendered = self.render(template_name, context)
        try:
            ensure_directory(output_path.parent)
            output_path.write_text(rendered)
        except IOError as e:
            raise ReportError(f"Failed to write output {output_path}: {e}")
        return rendered

    def summary_context(self, name: str, history: History, summary: RunSummary) -> Dict[str, Any]:
        config = history.meta.get("config", {})
        return {
            "name": name,
            "summary": summary,
            "maxcut": history.maxcut,
            "initial_acr": -history.initial_cost / history.maxcut,
            "config": config,
            "n": history.meta.get("n"),
            "m": history.meta.get("m"),
            "exact_acr": history.records[-1].acr_exact if history.records else None,
        }

    @staticmethod
    def sweep_context(report: Any) -> Dict[str, Any]:
        return {
            "name": report.spec.name,
            "description": report.spec.description,
            "source": report.spec.source,
            "axes": report.spec.axes,
            "group_axes": report.group_axes,
            "cells": report.cell_rows(),
            "gmean": report.gmean_rows(),
            "reduction": report.reduction_rows(),
            "failed": report.failed,
        }

    @staticmethod
    def write_rows(path: Path, rows: Sequence[Dict[str, Any]], fieldnames: Optional[List[str]] = None) -> None:
        """Delimited table with a header row; columns follow first appearance."""
        if fieldnames is None:
            fieldnames = []
            for row in rows:
                for key in row:
                    if key not in fieldnames:
                        fieldnames.append(key)
        ensure_directory(path.parent)
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=fieldnames, restval="")
            writer.writeheader()
            writer.writerows(rows)
