"""Batched kernels for small dense m x m matrices.

Every function accepts a single matrix of shape ``(m, m)`` or a stack of
shape ``(..., m, m)`` and acts on the trailing two axes, so the same code
serves one matrix and a whole grid of them.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import NumericalFailure, UsageError

SVD_TOL = 1e-14
SVD_MAX_SWEEPS = 30
NEAR_SINGULAR_RATIO = 1e-8


class SvdResult(NamedTuple):
    """``a = left @ diag(singular_values) @ right.T``, values sorted descending."""

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray


def _as_square(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise UsageError(f"expected (..., m, m) array, got shape {a.shape}")
    return a


def check_finite(a) -> np.ndarray:
    a = _as_square(a)
    if not np.all(np.isfinite(a)):
        raise UsageError("matrix entries must be finite")
    return a


def frobenius_inner(a, b) -> np.ndarray | float:
    """Tr(A B^T), i.e. the entrywise sum of A_ij B_ij."""
    a = _as_square(a)
    b = _as_square(b)
    if a.shape[-1] != b.shape[-1]:
        raise UsageError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    out = np.einsum("...ij,...ij->...", a, b)
    return float(out) if out.ndim == 0 else out


def frobenius_norm(a) -> np.ndarray | float:
    a = _as_square(a)
    out = np.sqrt(np.einsum("...ij,...ij->...", a, a))
    return float(out) if out.ndim == 0 else out


def determinant(a) -> np.ndarray | float:
    """Cofactor expansion for m <= 3, LU with partial pivoting beyond."""
    a = _as_square(a)
    m = a.shape[-1]
    if m == 1:
        out = a[..., 0, 0].copy()
    elif m == 2:
        out = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    elif m == 3:
        out = (
            a[..., 0, 0] * (a[..., 1, 1] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 1])
            - a[..., 0, 1] * (a[..., 1, 0] * a[..., 2, 2] - a[..., 1, 2] * a[..., 2, 0])
            + a[..., 0, 2] * (a[..., 1, 0] * a[..., 2, 1] - a[..., 1, 1] * a[..., 2, 0])
        )
    else:
        # LAPACK getrf: product of pivots, sign from row swaps
        out = np.linalg.det(a)
    return float(out) if np.ndim(out) == 0 else out


def _rotation(angle: np.ndarray) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def _svd2_angles(a00, a01, a10, a11):
    # A = R(phi) diag(s1, s2) R(theta), with s1 >= |s2| and s2 possibly negative
    e = 0.5 * (a00 + a11)
    f = 0.5 * (a00 - a11)
    g = 0.5 * (a10 + a01)
    h = 0.5 * (a10 - a01)
    q = np.hypot(e, h)
    r = np.hypot(f, g)
    a1 = np.arctan2(g, f)
    a2 = np.arctan2(h, e)
    return q + r, q - r, 0.5 * (a2 + a1), 0.5 * (a2 - a1)


def _svd_2x2(a: np.ndarray):
    s1, s2, phi, theta = _svd2_angles(a[..., 0, 0], a[..., 0, 1], a[..., 1, 0], a[..., 1, 1])
    left = _rotation(phi)
    right = _rotation(-theta)
    return left, np.stack([s1, s2], -1), right


def _svd_kogbetliantz(a: np.ndarray):
    # two-sided cyclic Jacobi: every factor is a product of plane rotations
    m = a.shape[-1]
    work = a.copy()
    left = np.broadcast_to(np.eye(m), a.shape).copy()
    right = left.copy()
    scale = np.sqrt(np.einsum("...ij,...ij->...", a, a))
    offmask = ~np.eye(m, dtype=bool)
    off = np.sqrt(np.sum(work[..., offmask] ** 2, axis=-1))
    for _ in range(SVD_MAX_SWEEPS):
        if np.all(off <= SVD_TOL * scale):
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                _, _, phi, theta = _svd2_angles(
                    work[..., p, p], work[..., p, q], work[..., q, p], work[..., q, q]
                )
                cp, sp = np.cos(phi)[..., None], np.sin(phi)[..., None]
                ct, st = np.cos(theta)[..., None], np.sin(theta)[..., None]
                # rows: work <- R(phi)^T work ; cols: work <- work R(theta)^T
                rp, rq = work[..., p, :].copy(), work[..., q, :].copy()
                work[..., p, :] = cp * rp + sp * rq
                work[..., q, :] = -sp * rp + cp * rq
                cpc, cqc = work[..., :, p].copy(), work[..., :, q].copy()
                work[..., :, p] = ct * cpc - st * cqc
                work[..., :, q] = st * cpc + ct * cqc
                lp, lq = left[..., :, p].copy(), left[..., :, q].copy()
                left[..., :, p] = cp * lp + sp * lq
                left[..., :, q] = -sp * lp + cp * lq
                vp, vq = right[..., :, p].copy(), right[..., :, q].copy()
                right[..., :, p] = ct * vp - st * vq
                right[..., :, q] = st * vp + ct * vq
        off = np.sqrt(np.sum(work[..., offmask] ** 2, axis=-1))
    else:
        if not np.all(off <= SVD_TOL * scale):
            worst = float(np.max(off / np.where(scale > 0, scale, 1.0)))
            raise NumericalFailure(
                f"Jacobi SVD did not converge in {SVD_MAX_SWEEPS} sweeps", residual=worst
            )
    return left, np.diagonal(work, axis1=-2, axis2=-1).copy(), right


def svd(a) -> SvdResult:
    """Singular value decomposition of one matrix or a stack of matrices.

    m = 1 and m = 2 are closed form; m >= 3 uses two-sided cyclic Jacobi.
    Output is deterministic: singular values descend, and each left singular
    vector has its largest-magnitude entry nonnegative (the sign is moved
    into the matching right vector).
    """
    a = check_finite(a)
    m = a.shape[-1]
    if m == 1:
        left = np.ones_like(a)
        sigma = a[..., 0].copy()
        right = np.ones_like(a)
    elif m == 2:
        left, sigma, right = _svd_2x2(a)
    else:
        left, sigma, right = _svd_kogbetliantz(a)

    # absorb negative diagonal signs into the right factor
    neg = sigma < 0
    sigma = np.abs(sigma)
    right = np.where(neg[..., None, :], -right, right)

    if m > 2:
        order = np.argsort(-sigma, axis=-1, kind="stable")
        sigma = np.take_along_axis(sigma, order, -1)
        left = np.take_along_axis(left, order[..., None, :], -1)
        right = np.take_along_axis(right, order[..., None, :], -1)

    idx = np.argmax(np.abs(left), axis=-2)
    lead = np.take_along_axis(left, idx[..., None, :], -2)
    flip = np.where(lead < 0, -1.0, 1.0)
    return SvdResult(left * flip, sigma, right * flip)


def singular_values(a) -> np.ndarray:
    return svd(a).singular_values


def nuclear_norm(a) -> np.ndarray | float:
    out = np.sum(svd(a).singular_values, axis=-1)
    return float(out) if out.ndim == 0 else out


def apply_singular_function(a, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """P diag(f(sigma)) Q^T for A = P diag(sigma) Q^T.

    ``f`` is called once on the array of singular values and must be
    vectorised.
    """
    p, sigma, q = svd(a)
    fs = np.asarray(f(sigma), dtype=float)
    if fs.shape != sigma.shape:
        fs = np.broadcast_to(fs, sigma.shape)
    if not np.all(np.isfinite(fs)):
        raise NumericalFailure("singular value function returned non-finite values")
    return np.einsum("...ik,...k,...jk->...ij", p, fs, q)


def near_singular(sigma: np.ndarray) -> np.ndarray:
    return sigma[..., -1] < NEAR_SINGULAR_RATIO * sigma[..., 0]


def polar_orthogonal(a, return_flag: bool = False):
    """Orthogonal polar factor P Q^T of A = P diag(sigma) Q^T.

    With ``return_flag`` the result is ``(factor, flag)`` where ``flag`` marks
    matrices whose smallest singular value is below 1e-8 times the largest;
    there the factor is still returned but is not unique.
    """
    p, sigma, q = svd(a)
    out = np.einsum("...ik,...jk->...ij", p, q)
    if return_flag:
        return out, near_singular(sigma)
    return out
