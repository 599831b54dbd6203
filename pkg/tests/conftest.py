import math

import numpy as np
import pytest

from macsplit.field import Grid, MatrixField
from macsplit.spectral import SpectralPlan

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def grid2():
    return Grid(d=2, n=16)


@pytest.fixture
def plan2(grid2):
    return SpectralPlan(grid2)


def random_field(grid, m, rng, scale=1.0):
    return MatrixField(grid, scale * rng.uniform(-1, 1, grid.shape + (m, m)))


def cos_x_field(grid, m=2):
    x = grid.coords()[0]
    data = np.zeros(grid.shape + (m, m))
    data[..., 0, 0] = np.cos(x)
    return MatrixField(grid, data)


def admissible_field(grid, m, rng):
    """Random field with pointwise ||U||_F <= sqrt(m)."""
    v = rng.standard_normal(grid.shape + (m, m))
    v /= np.linalg.norm(v, axis=(-2, -1), keepdims=True)
    return MatrixField(grid, v * math.sqrt(m) * rng.random(grid.shape + (1, 1)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
