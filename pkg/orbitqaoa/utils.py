"""Utility functions for orbitqaoa."""

import os
from pathlib import Path
from typing import Optional, Dict, Any
from rich.console import Console
from rich.text import Text
from rich.theme import Theme

# Custom theme for rich console
custom_theme = Theme({
    "arrow": "cyan",
    "check": "green",
    "cross": "red",
    "info_icon": "blue",
    "warn": "bright_yellow",
    "header": "bold cyan",
    "dim": "dim",
})

console = Console(theme=custom_theme)

PROJECT_FILES = ("orbitqaoa.yaml", "orbitqaoa.yml")


def print_header(text: str) -> None:
    """Print a header message."""
    line = Text("=" * 50, style="header")
    title = Text(text.center(50), style="header")
    console.print()
    console.print(line)
    console.print(title)
    console.print(line)
    console.print()


def print_step(text: str) -> None:
    """Print a step message."""
    arrow = Text("→ ", style="arrow")
    msg = Text(text, style="bold")
    console.print(arrow + msg)


def _print_marked(mark: str, style: str, text: str, indent: bool, body_style: str = "") -> None:
    prefix = "  " if indent else ""
    console.print(Text(f"{prefix}{mark} ", style=style) + Text(text, style=body_style), highlight=False)


def print_success(text: str, indent: bool = True) -> None:
    _print_marked("✓", "check", text, indent)


def print_error(text: str, indent: bool = True) -> None:
    _print_marked("✗", "cross", text, indent)


def print_warning(text: str, indent: bool = True) -> None:
    _print_marked("⚠", "warn", text, indent)


def print_info(text: str, indent: bool = True) -> None:
    """Dimmed note, used for counts, paths and plugin loading."""
    _print_marked("ℹ", "info_icon", text, indent, body_style="dim")


def find_project_root(start_path: Optional[Path] = None) -> Optional[Path]:
    """
    Find the project root directory by looking for orbitqaoa.yaml.

    Args:
        start_path: Starting path for search (defaults to current directory)

    Returns:
        Path to project root directory or None if not found
    """
    if start_path is None:
        start_path = Path.cwd()

    current = start_path.resolve()

    # Search up to 5 levels
    for _ in range(5):
        if any((current / name).exists() for name in PROJECT_FILES):
            return current

        parent = current.parent
        if parent == current:  # Reached filesystem root
            break
        current = parent

    return None


def get_env_var(key: str, default: Optional[str] = None) -> Optional[str]:
    """Get environment variable with optional default."""
    return os.environ.get(key, default)


def deep_merge(base: Dict[Any, Any], override: Dict[Any, Any]) -> Dict[Any, Any]:
    """
    Deep merge two dictionaries.

    Args:
        base: Base dictionary
        override: Override dictionary

    Returns:
        Merged dictionary
    """
    result = base.copy()

    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = value

    return result


def ensure_directory(path: Path) -> None:
    """Ensure directory exists, create if it doesn't."""
    path.mkdir(parents=True, exist_ok=True)


class OrbitError(Exception):
    """Base exception for orbitqaoa errors."""
    pass


class ConfigError(OrbitError):
    """Configuration related error."""
    pass


class InvalidArgumentError(OrbitError):
    """An operation was called with arguments outside its domain."""
    pass


class SizeLimitError(OrbitError):
    """Problem size exceeds an enumeration or memory guard."""
    pass


class GenerationError(OrbitError):
    """A random graph model could not produce a connected instance."""
    pass


class NumericalError(OrbitError):
    """Non-finite values reached the optimizer."""
    pass


class ExperimentError(OrbitError):
    """An experiment run or its stored output is unusable."""
    pass


class ReportError(OrbitError):
    """Report rendering or writing failed."""
    pass
