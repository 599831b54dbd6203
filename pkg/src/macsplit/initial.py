"""Initial matrix fields."""
from __future__ import annotations

import numpy as np

from .errors import UsageError
from .field import Grid, MatrixField


def rng_from_seed(seed: int) -> np.random.Generator:
    """Counter-based Philox stream; identical seeds give identical draws."""
    return np.random.Generator(np.random.Philox(int(seed)))


def ic_random(grid: Grid, m: int, seed: int) -> MatrixField:
    """Every entry at every node i.i.d. uniform on [0, 0.1]."""
    if m < 1:
        raise UsageError("m must be >= 1")
    data = 0.1 * rng_from_seed(seed).random(grid.shape + (m, m))
    return MatrixField(grid, data)


def ic_admissible(grid: Grid, m: int, seed: int) -> MatrixField:
    """Random direction per node, Frobenius radius uniform on [0, sqrt(m)]."""
    if m < 1:
        raise UsageError("m must be >= 1")
    rng = rng_from_seed(seed)
    v = rng.standard_normal(grid.shape + (m, m))
    v /= np.linalg.norm(v, axis=(-2, -1), keepdims=True)
    return MatrixField(grid, v * (np.sqrt(m) * rng.random(grid.shape + (1, 1))))


def _angle(grid: Grid):
    if grid.d != 2:
        raise UsageError("this initial condition needs d = 2")
    x, y = grid.coords()
    return x, y, 0.5 * np.pi * np.sin(x + y)


def flower_indicator(grid: Grid) -> np.ndarray:
    """1 inside r < 2 pi (0.3 + 0.06 sin 6 theta), theta = atan2(x, y); else 0."""
    x, y, _ = _angle(grid)
    r = np.hypot(x, y)
    theta = np.arctan2(x, y)
    return (r < 2 * np.pi * (0.3 + 0.06 * np.sin(6 * theta))).astype(float)


def ic_structured(grid: Grid, m: int = 2) -> MatrixField:
    """Rotation by alpha = (pi/2) sin(x+y) inside a six-petal flower, reflection outside."""
    if m != 2:
        raise UsageError("structured initial data is defined for m = 2")
    _, _, alpha = _angle(grid)
    chi = flower_indicator(grid)
    c, s = np.cos(alpha), np.sin(alpha)
    data = np.empty(grid.shape + (2, 2))
    data[..., 0, 0] = c
    data[..., 1, 0] = s
    data[..., 0, 1] = -chi * s + (1 - chi) * s
    data[..., 1, 1] = chi * c - (1 - chi) * c
    return MatrixField(grid, data)


def ic_rotation(grid: Grid, m: int = 2) -> MatrixField:
    """Smooth rotation field [[cos a, -sin a], [sin a, cos a]], a = (pi/2) sin(x+y)."""
    if m != 2:
        raise UsageError("rotation initial data is defined for m = 2")
    _, _, alpha = _angle(grid)
    c, s = np.cos(alpha), np.sin(alpha)
    data = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
    return MatrixField(grid, data)
