"""CLI commands for orbitqaoa."""

from orbitqaoa.commands.generate import generate
from orbitqaoa.commands.list_experiments import list_experiments
from orbitqaoa.commands.report import report
from orbitqaoa.commands.sweep import sweep
from orbitqaoa.commands.train import train

__all__ = ["generate", "list_experiments", "report", "sweep", "train"]
