"""Entrywise Fourier operators on the periodic grid.

Transforms run over the spatial axes only, so each of the m^2 matrix
entries is transformed independently. The forward transform is scaled by
1/n^d; with that normalisation ``L^d * sum_k |U_hat(k)|^2`` equals the
physical-space integral of ``|U|^2``.
"""
from __future__ import annotations

import numpy as np

from .errors import UsageError
from .field import Grid, MatrixField


class SpectralPlan:
    """Wavenumber tables for one grid.

    Integer wavenumbers run over ``-n/2 .. n/2-1`` (stored in numpy FFT
    order) and are scaled by ``2*pi/L``. Plans are read-only after
    construction and can be shared.
    """

    def __init__(self, grid: Grid):
        self.grid = grid
        k = np.fft.fftfreq(grid.n, d=1.0 / grid.n)  # contains -n/2, never +n/2
        self.k = k * (2 * np.pi / grid.length)
        axes = np.meshgrid(*([self.k] * grid.d), indexing="ij")
        self.k2 = sum(a * a for a in axes)
        # real-input half spectrum along the last spatial axis; its +n/2 entry
        # has the same |k|^2 as -n/2
        khalf = np.fft.rfftfreq(grid.n, d=1.0 / grid.n) * (2 * np.pi / grid.length)
        half = np.meshgrid(*([self.k] * (grid.d - 1) + [khalf]), indexing="ij")
        self.k2_half = sum(a * a for a in half)
        self.axes = tuple(range(grid.d))

    def forward(self, data: np.ndarray) -> np.ndarray:
        return np.fft.fftn(data, axes=self.axes) / self.grid.n**self.grid.d

    def backward(self, coeffs: np.ndarray) -> np.ndarray:
        return np.fft.ifftn(coeffs * self.grid.n**self.grid.d, axes=self.axes).real

    def parseval_sum(self, coeffs: np.ndarray, weight: np.ndarray | None = None) -> float:
        """L^d * sum_k w(k) * sum_ij |c_ij(k)|^2."""
        power = np.sum(coeffs.real**2 + coeffs.imag**2, axis=(-2, -1))
        if weight is not None:
            power = weight * power
        return self.grid.volume * float(np.sum(power))

    def check(self, u: MatrixField):
        if u.grid != self.grid:
            raise UsageError("field grid does not match spectral plan")


def heat_propagate(u: MatrixField, t: float, eps: float, plan: SpectralPlan) -> MatrixField:
    """Apply exp(t eps^2 Laplacian) to every matrix entry."""
    if t < 0:
        raise UsageError(f"heat propagation time must be >= 0, got {t}")
    plan.check(u)
    if t == 0:
        return u.copy()
    mult = np.exp(-t * eps * eps * plan.k2_half)[(...,) + (None, None)]
    coeffs = np.fft.rfftn(u.data, axes=plan.axes)
    out = np.fft.irfftn(coeffs * mult, s=plan.grid.shape, axes=plan.axes)
    return u.with_data(out)


def linear_energy_form(u: MatrixField, tau: float, eps: float, plan: SpectralPlan) -> float:
    """(1/(2 tau)) * integral of <(1 - exp(tau eps^2 Laplacian)) U, U>_F."""
    if tau <= 0:
        raise UsageError(f"tau must be > 0, got {tau}")
    plan.check(u)
    weight = -np.expm1(-tau * eps * eps * plan.k2) / (2 * tau)
    return plan.parseval_sum(plan.forward(u.data), weight)


def h1_seminorm_sq(u: MatrixField, plan: SpectralPlan) -> float:
    """Integral of ||grad U||_F^2, evaluated spectrally."""
    plan.check(u)
    return plan.parseval_sum(plan.forward(u.data), plan.k2)
