"""Shared fixtures for the orbitqaoa test suite."""

import math
from pathlib import Path

import numpy as np
import pytest

from orbitqaoa.ansatz import Layout, Mixer, ParamSet
from orbitqaoa.graph import Graph, gen_path, gen_pl


@pytest.fixture
def star3() -> Graph:
    """Star with center 0 and leaves 1, 2, 3."""
    return Graph(4, ((0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)))


@pytest.fixture
def path5() -> Graph:
    return gen_path(5)


@pytest.fixture
def pl6() -> Graph:
    return gen_pl(6, seed=7)


@pytest.fixture
def triangle() -> Graph:
    return Graph(3, ((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)))


def star_optimum(g: Graph) -> ParamSet:
    """One multi-angle layer that cuts every edge of a star centered on node 0."""
    gamma = np.full((1, g.m), math.pi / 4)
    beta = np.full((1, g.n), math.pi / 4)
    beta[0, 0] = 0.0
    return ParamSet(
        1, Layout.MULTI_ANGLE, Mixer.X, g.n, g.m, gamma, beta,
        np.ones_like(gamma, dtype=bool), np.ones_like(beta, dtype=bool),
    )


def write_yaml(path: Path, text: str) -> Path:
    path.write_text(text.lstrip())
    return path
