"""Field energies: the modified energy of the splitting scheme and Ginzburg-Landau energies."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import smallmat
from .dynamics import GCoefficients, _flow_factor, g_trace, sqrt_trace_term
from .field import MatrixField
from .spectral import SpectralPlan, h1_seminorm_sq, heat_propagate, linear_energy_form


@dataclass(frozen=True)
class EnergyBreakdown:
    linear_part: float
    g_part: float

    @property
    def total(self) -> float:
        return self.linear_part + self.g_part


def modified_energy(u: MatrixField, tau: float, eps: float, plan: SpectralPlan) -> EnergyBreakdown:
    """Lyapunov functional of the Strang scheme with step tau.

    Linear part: (1/(2 tau)) <(1 - e^{tau eps^2 Lap}) U, U>; nonlinear part:
    integral of Tr G(e^{tau/2 eps^2 Lap} U).
    """
    lin = linear_energy_form(u, tau, eps, plan)
    w = heat_propagate(u, tau / 2, eps, plan)
    g = u.grid.cell_volume * float(np.sum(g_trace(w.data, tau)))
    return EnergyBreakdown(lin, g)


def _penalty(u: MatrixField) -> float:
    # h^d * sum ||I - U U^T||_F^2
    uu = u.data @ np.swapaxes(u.data, -1, -2)
    r = np.eye(u.m) - uu
    return u.grid.cell_volume * float(np.sum(r * r))


def gl_energy_rescaled(u: MatrixField, eps: float, plan: SpectralPlan) -> float:
    """(1/2) int |grad U|^2 + (1/(4 eps^2)) int ||I - U U^T||_F^2."""
    return 0.5 * h1_seminorm_sq(u, plan) + _penalty(u) / (4 * eps * eps)


def gl_energy_physical(u: MatrixField, eps: float, plan: SpectralPlan) -> float:
    """(eps^2/2) int |grad U|^2 + (1/4) int ||I - U U^T||_F^2.

    Its L2 gradient flow is dU/dt = eps^2 Lap U + U - U U^T U.
    """
    return 0.5 * eps * eps * h1_seminorm_sq(u, plan) + 0.25 * _penalty(u)


def e1_energy(u: MatrixField, tau: float) -> float:
    """(1/(2 tau)) int <U U^T + 2 e^tau/(e^{2tau}-1), I>_F, the constant entering as a multiple of I."""
    co = GCoefficients.from_tau(tau)
    const = 2 * co.c2 * tau  # 2 e^tau / (e^{2tau} - 1)
    per_node = np.sum(u.data * u.data, axis=(-2, -1)) + u.m * const
    return u.grid.cell_volume * float(np.sum(per_node)) / (2 * tau)


def e2_energy(u: MatrixField, tau: float, eps: float, plan: SpectralPlan) -> float:
    """int e^tau/(tau(e^{2tau}-1)) Tr[(I + (e^{2tau}-1) W W^T)^{1/2}], W = e^{tau/2 eps^2 Lap} U."""
    w = heat_propagate(u, tau / 2, eps, plan)
    sigma = smallmat.singular_values(w.data)
    return u.grid.cell_volume * float(np.sum(sqrt_trace_term(sigma, tau)))


def e2_frechet_derivative(u: MatrixField, tau: float, eps: float, plan: SpectralPlan) -> MatrixField:
    """L2 gradient of e2_energy.

    (e^tau/tau) S(tau/2) [(I + (e^{2tau}-1) W W^T)^{-1/2} W] with S the heat
    semigroup and W = S(tau/2) U. The bracket is one exact nonlinear flow
    step divided by e^tau, so tau times the result is one Strang step.
    """
    co = GCoefficients.from_tau(tau)
    w = heat_propagate(u, tau / 2, eps, plan)
    inner = smallmat.apply_singular_function(
        w.data, lambda s: _flow_factor(s, co.decay2) / tau
    )
    return heat_propagate(w.with_data(inner), tau / 2, eps, plan)
