"""Matrix-valued grid functions on the periodic box [-L/2, L/2]^d."""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import smallmat
from .errors import UsageError

DET_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with ``n`` nodes per axis.

    Nodes sit at ``x_j = -L/2 + j*h`` for ``j = 0..n-1``; ``x_n`` is
    identified with ``x_0``.
    """

    d: int = 2
    n: int = 64
    length: float = 2 * math.pi

    def __post_init__(self):
        if self.d not in (1, 2):
            raise UsageError(f"d must be 1 or 2, got {self.d}")
        if self.n < 8 or self.n & (self.n - 1):
            raise UsageError(f"n must be a power of two >= 8, got {self.n}")
        if not self.length > 0:
            raise UsageError("domain length must be positive")

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.d

    @property
    def volume(self) -> float:
        return self.length**self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    def axis(self) -> np.ndarray:
        return -0.5 * self.length + np.arange(self.n) * self.spacing

    def coords(self) -> tuple[np.ndarray, ...]:
        """Node coordinates, ``indexing='ij'`` (first array index is x)."""
        x = self.axis()
        return tuple(np.meshgrid(*([x] * self.d), indexing="ij"))


@dataclass
class MatrixField:
    """One m x m matrix per grid node; ``data`` has shape ``grid.shape + (m, m)``."""

    grid: Grid
    data: np.ndarray
    meta: dict = dc_field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=float)
        g = self.grid
        if self.data.ndim != g.d + 2 or self.data.shape[: g.d] != g.shape:
            raise UsageError(f"data shape {self.data.shape} does not fit grid {g.shape}")
        if self.data.shape[-1] != self.data.shape[-2]:
            raise UsageError("node values must be square matrices")

    @property
    def m(self) -> int:
        return self.data.shape[-1]

    @classmethod
    def constant(cls, grid: Grid, value) -> "MatrixField":
        value = np.asarray(value, dtype=float)
        return cls(grid, np.broadcast_to(value, grid.shape + value.shape).copy())

    def with_data(self, data: np.ndarray) -> "MatrixField":
        return MatrixField(self.grid, data)

    def copy(self) -> "MatrixField":
        return MatrixField(self.grid, self.data.copy(), dict(self.meta))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.data)))


def _check_compatible(a: MatrixField, b: MatrixField):
    if a.grid != b.grid or a.m != b.m:
        raise UsageError("fields live on different grids or have different m")


def max_frobenius(u: MatrixField) -> float:
    return float(np.max(smallmat.frobenius_norm(u.data)))


def max_abs_det(u: MatrixField) -> float:
    return float(np.max(np.abs(smallmat.determinant(u.data))))


def l2_inner(a: MatrixField, b: MatrixField) -> float:
    """h^d * sum over nodes of <A(x), B(x)>_F."""
    _check_compatible(a, b)
    return a.grid.cell_volume * float(np.sum(a.data * b.data))


def l2_difference(a: MatrixField, b: MatrixField) -> float:
    """Squared L2 distance: integral of ||A - B||_F^2 by the rectangle rule."""
    _check_compatible(a, b)
    diff = a.data - b.data
    return a.grid.cell_volume * float(np.sum(diff * diff))


def det_sign_image(u: MatrixField) -> np.ndarray:
    """uint8 image: 255 where det > 0, 0 where det < 0, 128 where |det| <= 1e-12.

    Rows follow the first grid axis.
    """
    if u.grid.d != 2:
        raise UsageError("det-sign image needs a 2D field")
    det = smallmat.determinant(u.data)
    img = np.full(det.shape, 128, dtype=np.uint8)
    img[det > DET_ZERO_TOL] = 255
    img[det < -DET_ZERO_TOL] = 0
    return img


def write_pgm(image: np.ndarray, path) -> None:
    image = np.asarray(image, dtype=np.uint8)
    rows, cols = image.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(image.tobytes())


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    parts = raw.split(maxsplit=4)
    if parts[0] != b"P5":
        raise UsageError(f"{path}: not a binary PGM")
    cols, rows, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise UsageError(f"{path}: unsupported maxval {maxval}")
    return np.frombuffer(parts[4][: rows * cols], dtype=np.uint8).reshape(rows, cols)


# snapshot format: one ASCII header line, then float64 little-endian node-major data
_MAGIC = "MACFIELD v1"


def write_snapshot(u: MatrixField, path, t: float = 0.0) -> None:
    g = u.grid
    header = f"{_MAGIC} d={g.d} n={g.n} m={u.m} L={g.length!r} t={float(t)!r}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(u.data.astype("<f8").tobytes())


def read_snapshot(path) -> tuple[MatrixField, float]:
    raw = Path(path).read_bytes()
    end = raw.index(b"\n")
    header = raw[:end].decode("ascii")
    if not header.startswith(_MAGIC + " "):
        raise UsageError(f"{path}: not a MACFIELD v1 snapshot")
    fields = dict(item.split("=", 1) for item in header[len(_MAGIC) + 1 :].split())
    grid = Grid(d=int(fields["d"]), n=int(fields["n"]), length=float(fields["L"]))
    m = int(fields["m"])
    count = grid.n**grid.d * m * m
    values = np.frombuffer(raw[end + 1 :], dtype="<f8")
    if values.size != count:
        raise UsageError(f"{path}: expected {count} values, found {values.size}")
    data = values.astype(float).reshape(grid.shape + (m, m))
    return MatrixField(grid, data), float(fields["t"])
