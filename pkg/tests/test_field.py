import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from macsplit.errors import UsageError
from macsplit.field import (
    Grid,
    MatrixField,
    det_sign_image,
    l2_difference,
    max_abs_det,
    max_frobenius,
    read_pgm,
    read_snapshot,
    write_pgm,
    write_snapshot,
)
from macsplit.initial import flower_indicator, ic_structured

from .conftest import random_field


def test_grid_geometry():
    g = Grid(d=2, n=256)
    assert g.n * g.spacing == g.length
    assert g.axis()[0] == -math.pi
    assert g.axis()[g.n // 2] == pytest.approx(0.0, abs=1e-15)
    assert g.volume == pytest.approx(4 * math.pi**2)


@pytest.mark.parametrize("kwargs", [dict(d=3), dict(n=12), dict(n=4), dict(length=0.0)])
def test_grid_rejects(kwargs):
    with pytest.raises(UsageError):
        Grid(**kwargs)


def test_field_shape_checked(grid2):
    with pytest.raises(UsageError):
        MatrixField(grid2, np.zeros((8, 8, 2, 2)))
    with pytest.raises(UsageError):
        MatrixField(grid2, np.zeros(grid2.shape + (2, 3)))


def test_max_frobenius(grid2):
    assert max_frobenius(MatrixField.constant(grid2, np.eye(3))) == pytest.approx(math.sqrt(3))
    assert max_frobenius(MatrixField.constant(grid2, np.zeros((2, 2)))) == 0


def test_max_abs_det(grid2):
    assert max_abs_det(MatrixField.constant(grid2, np.eye(2))) == 1
    assert max_abs_det(MatrixField.constant(grid2, np.zeros((2, 2)))) == 0


def test_det_bound_from_frobenius_bound(grid2, rng):
    # |det| <= (||U||_F^2 / m)^{m/2} <= 1 when ||U||_F <= sqrt(m)
    for m in (2, 3):
        v = rng.standard_normal(grid2.shape + (m, m))
        v *= math.sqrt(m) / np.linalg.norm(v, axis=(-2, -1), keepdims=True)
        assert max_abs_det(MatrixField(grid2, v)) <= 1 + 1e-10


def test_l2_difference_constant_fields():
    g = Grid(2, 16)
    a = MatrixField.constant(g, np.eye(2))
    b = MatrixField.constant(g, np.zeros((2, 2)))
    assert l2_difference(a, a) == 0
    assert l2_difference(a, b) == pytest.approx(8 * math.pi**2, rel=1e-14)


def test_l2_difference_against_loops(grid2, rng):
    a = random_field(grid2, 2, rng)
    b = random_field(grid2, 2, rng)
    total = 0.0
    for i in range(grid2.n):
        for j in range(grid2.n):
            for r in range(2):
                for c in range(2):
                    total += (a.data[i, j, r, c] - b.data[i, j, r, c]) ** 2
    assert l2_difference(a, b) == pytest.approx(total * grid2.spacing**2, rel=1e-12)


def test_l2_difference_grid_mismatch(rng):
    a = random_field(Grid(2, 16), 2, rng)
    b = random_field(Grid(2, 32), 2, rng)
    with pytest.raises(UsageError):
        l2_difference(a, b)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_l2_difference_metric(seed):
    rng = np.random.default_rng(seed)
    g = Grid(1, 8)
    a = random_field(g, 2, rng)
    b = random_field(g, 2, rng)
    d_ab, d_ba = l2_difference(a, b), l2_difference(b, a)
    assert d_ab == pytest.approx(d_ba, rel=1e-14)
    assert d_ab > 0
    assert l2_difference(a, a.copy()) == 0


def test_reductions_repeatable(grid2, rng):
    a = random_field(grid2, 3, rng)
    b = random_field(grid2, 3, rng)
    assert max_frobenius(a) == max_frobenius(a)
    assert l2_difference(a, b) == l2_difference(a, b)


def test_det_sign_image_constants(grid2):
    assert np.all(det_sign_image(MatrixField.constant(grid2, np.eye(2))) == 255)
    assert np.all(det_sign_image(MatrixField.constant(grid2, np.diag([1.0, -1.0]))) == 0)
    assert np.all(det_sign_image(MatrixField.constant(grid2, np.zeros((2, 2)))) == 128)


def test_det_sign_image_flower():
    g = Grid(2, 64)
    img = det_sign_image(ic_structured(g))
    chi = flower_indicator(g)
    assert np.array_equal(img == 255, chi == 1)
    assert np.array_equal(img == 0, chi == 0)


def test_det_sign_image_needs_2d(rng):
    with pytest.raises(UsageError):
        det_sign_image(random_field(Grid(1, 16), 2, rng))


def test_pgm_roundtrip(tmp_path, grid2):
    img = det_sign_image(MatrixField.constant(grid2, np.eye(2)))
    path = tmp_path / "a.pgm"
    write_pgm(img, path)
    raw = path.read_bytes()
    assert raw.startswith(b"P5\n16 16\n255\n")
    assert len(raw) == len(b"P5\n16 16\n255\n") + 256
    assert np.array_equal(read_pgm(path), img)


def test_snapshot_format(tmp_path, rng):
    g = Grid(2, 8)
    u = random_field(g, 2, rng)
    path = tmp_path / "u.macfield"
    write_snapshot(u, path, t=0.25)
    raw = path.read_bytes()
    header = f"MACFIELD v1 d=2 n=8 m=2 L={g.length!r} t=0.25\n".encode()
    assert raw.startswith(header)
    assert raw[len(header):] == u.data.astype("<f8").tobytes()
    back, t = read_snapshot(path)
    assert t == 0.25 and back.grid == g
    assert np.array_equal(back.data, u.data)


def test_snapshot_rejects_garbage(tmp_path):
    path = tmp_path / "bad"
    path.write_bytes(b"NOPE\n")
    with pytest.raises(UsageError):
        read_snapshot(path)
