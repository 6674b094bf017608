"""orbitqaoa - layerwise QAOA training workbench for Max-Cut."""

__version__ = "0.1.0"
__license__ = "MIT"

from orbitqaoa.cli import main

__all__ = ["main"]
