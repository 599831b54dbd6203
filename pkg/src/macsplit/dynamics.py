"""Pointwise nonlinear flow dU/dt = U - U U^T U and the functionals built on it.

All closed forms act on singular values. Every expression containing
exp(2t) is rewritten with exp(-2t) so that very long flows (rescaled time
t/eps^2 can exceed 1e4) stay finite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import smallmat
from .errors import UsageError


@dataclass(frozen=True)
class GCoefficients:
    """Time-step dependent constants of the G functional.

    ``c2 = e^tau / (tau (e^{2 tau} - 1))``; ``beta = e^{2 tau} - 1`` overflows
    to inf past tau ~ 355 and is only reported, never used in evaluation.
    """

    tau: float
    c1: float
    c2: float
    beta: float
    decay: float  # e^{-tau}
    decay2: float  # e^{-2 tau}

    @classmethod
    def from_tau(cls, tau: float) -> "GCoefficients":
        if not tau > 0:
            raise UsageError(f"tau must be > 0, got {tau}")
        one_minus = -math.expm1(-2 * tau)
        with np.errstate(over="ignore"):
            beta = float(np.expm1(np.float64(2 * tau)))
        return cls(
            tau=tau,
            c1=1 / (2 * tau),
            c2=math.exp(-tau) / (tau * one_minus),
            beta=beta,
            decay=math.exp(-tau),
            decay2=math.exp(-2 * tau),
        )


def _flow_factor(sigma: np.ndarray, decay2: float) -> np.ndarray:
    # sigma / sqrt(e^{-2t} + (1 - e^{-2t}) sigma^2), with 0 -> 0
    denom = np.sqrt(decay2 + (1 - decay2) * sigma * sigma)
    return np.divide(sigma, denom, out=np.zeros_like(sigma), where=denom > 0)


def nonlinear_flow(u0, t: float) -> np.ndarray:
    """Exact solution at time t of dU/dt = U - U U^T U from U(0) = u0."""
    if t < 0:
        raise UsageError(f"flow time must be >= 0, got {t}")
    u0 = smallmat.check_finite(u0)
    if t == 0:
        return u0.copy()
    decay2 = math.exp(-2 * t)
    return smallmat.apply_singular_function(u0, lambda s: _flow_factor(s, decay2))


def nonlinear_flow_rescaled(u0, t_tilde: float, eps: float) -> np.ndarray:
    """Flow of dU/dt~ = (U - U U^T U)/eps^2, i.e. the plain flow for t~/eps^2."""
    if not eps > 0:
        raise UsageError(f"eps must be > 0, got {eps}")
    if t_tilde < 0:
        raise UsageError(f"flow time must be >= 0, got {t_tilde}")
    return nonlinear_flow(u0, t_tilde / (eps * eps))


def project_orthogonal(u, return_flag: bool = False):
    """Nearest orthogonal matrix P Q^T; the eps -> 0 limit of the rescaled flow."""
    return smallmat.polar_orthogonal(u, return_flag=return_flag)


def g_scalar(lam, tau):
    """g(lambda) = lambda^2/2 - e^tau/(e^{2tau}-1) * (sqrt(1 + (e^{2tau}-1) lambda^2) - 1).

    Evaluated as lambda^2/2 - lambda^2 / (sqrt(e^{-2tau} + (1-e^{-2tau}) lambda^2) + e^{-tau}),
    which is the same quantity without cancellation or overflow. ``tau`` may
    be an array broadcasting against ``lam``.
    """
    tau = np.asarray(tau, dtype=float)
    if not np.all(tau > 0):
        raise UsageError("tau must be > 0")
    lam = np.asarray(lam, dtype=float)
    l2 = lam * lam
    decay2 = np.exp(-2 * tau)
    denom = np.sqrt(decay2 + (1 - decay2) * l2) + np.exp(-tau)
    # denom underflows to 0 only at lambda = 0 with tau past ~745, where g = 0
    ratio = np.divide(l2, denom, out=np.zeros(np.broadcast(l2, denom).shape), where=denom > 0)
    out = 0.5 * l2 - ratio
    return float(out) if out.ndim == 0 else out


def g_trace(u, tau):
    """Tr G(U) = (1/tau) * sum_i g(sigma_i(U)); an array ``tau`` pairs with the leading axes of ``u``."""
    sigma = smallmat.singular_values(u)
    tau = np.asarray(tau, dtype=float)
    out = np.sum(g_scalar(sigma, tau[..., None]), axis=-1) / tau
    return float(out) if np.ndim(out) == 0 else out


def sqrt_trace_term(sigma: np.ndarray, tau: float) -> np.ndarray:
    """e^tau/(tau(e^{2tau}-1)) * Tr[(I + (e^{2tau}-1) W W^T)^{1/2}] from the singular values of W."""
    co = GCoefficients.from_tau(tau)
    root = np.sqrt(co.decay2 + (1 - co.decay2) * sigma * sigma)
    return np.sum(root, axis=-1) / (tau * (1 - co.decay2))


def _rhs(u: np.ndarray) -> np.ndarray:
    return u - u @ np.swapaxes(u, -1, -2) @ u


def ode_oracle_rk4(u0, t: float, h: float) -> np.ndarray:
    """Classical RK4 for dU/dt = U - U U^T U with fixed step h.

    The last step is shortened to land exactly on t.
    """
    if t < 0:
        raise UsageError(f"t must be >= 0, got {t}")
    u = np.array(u0, dtype=float)
    if t == 0:
        return u
    if not 0 < h:
        raise UsageError(f"step must be > 0, got {h}")
    nsteps = int(math.floor(t / h + 1e-9))
    steps = [h] * nsteps
    rest = t - nsteps * h
    if rest > 1e-14 * t:
        steps.append(rest)
    for dt in steps:
        k1 = _rhs(u)
        k2 = _rhs(u + 0.5 * dt * k1)
        k3 = _rhs(u + 0.5 * dt * k2)
        k4 = _rhs(u + dt * k3)
        u = u + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return u
