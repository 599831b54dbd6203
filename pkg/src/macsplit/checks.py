"""Randomised inequality suites for the pointwise kernels.

Each suite draws seeded samples, evaluates ``lhs <= rhs + slack`` and
reports the worst margin together with the inputs of every violation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import smallmat
from .dynamics import _flow_factor, g_scalar, g_trace, nonlinear_flow_rescaled, project_orthogonal
from .initial import rng_from_seed

SLACK = 1e-10
MAX_REPORTED = 5


@dataclass
class SuiteResult:
    name: str
    statement: str
    samples: int
    worst_margin: float  # min over samples of rhs - lhs (+ slack for ratio tests)
    violations: list[dict] = field(default_factory=list)
    violation_count: int = 0

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def summary(self) -> str:
        status = "ok" if self.ok else f"FAILED ({self.violation_count} violations)"
        return f"{self.name}: {status}; samples={self.samples}, worst margin={self.worst_margin:.3e}"


def _split_by_m(rng: np.random.Generator, samples: int, m_max: int = 5):
    ms = rng.integers(1, m_max + 1, size=samples)
    return [(m, int(np.count_nonzero(ms == m))) for m in range(1, m_max + 1)]


def _collect(result: SuiteResult, margin: np.ndarray, inputs: dict, slack: float = SLACK):
    bad = np.flatnonzero(margin < -slack)
    result.violation_count += bad.size
    result.worst_margin = min(result.worst_margin, float(np.min(margin)) if margin.size else math.inf)
    for i in bad[: MAX_REPORTED - len(result.violations)]:
        result.violations.append(
            {k: (v[i].tolist() if isinstance(v, np.ndarray) else v) for k, v in inputs.items()}
            | {"margin": float(margin[i])}
        )


def trace_inequality(samples: int, seed: int) -> SuiteResult:
    """Tr[(I + a diag^2(U))^{1/2}] <= Tr[(I + a U U^T)^{1/2}] for a in (0, 100]."""
    rng = rng_from_seed(seed)
    res = SuiteResult("trace-inequality", "Tr (I + a diag^2 U)^1/2 <= Tr (I + a U U^T)^1/2", samples, math.inf)
    for m, count in _split_by_m(rng, samples):
        u = rng.uniform(-10, 10, (count, m, m))
        alpha = 100 * (1 - rng.random(count))
        diag = np.diagonal(u, axis1=-2, axis2=-1)
        lhs = np.sum(np.sqrt(1 + alpha[:, None] * diag**2), -1)
        sigma = smallmat.singular_values(u)
        rhs = np.sum(np.sqrt(1 + alpha[:, None] * sigma**2), -1)
        _collect(res, rhs - lhs, {"U": u, "alpha": alpha})
    return res


def g_lower_bound(samples: int, seed: int) -> SuiteResult:
    """Tr G(U) >= -m/4 for tau in (0, 50]."""
    rng = rng_from_seed(seed)
    res = SuiteResult("g-lower-bound", "Tr G(U) >= -m/4", samples, math.inf)
    for m, count in _split_by_m(rng, samples):
        u = rng.uniform(-1, 1, (count, m, m)) * rng.uniform(0, 2, (count, 1, 1))
        tau = 50 * (1 - rng.random(count))
        value = g_trace(u, tau)
        _collect(res, value + m / 4, {"U": u, "tau": tau})
    return res


def g_upper_bound(samples: int, seed: int) -> SuiteResult:
    """Tr G(U) - Tr G(diag U) <= ||U - diag U||_F^2 / (2 tau)."""
    rng = rng_from_seed(seed)
    res = SuiteResult("g-upper-bound", "Tr G(U) - Tr G(diag U) <= |U - diag U|^2/(2 tau)", samples, math.inf)
    for m, count in _split_by_m(rng, samples):
        u = rng.uniform(-1, 1, (count, m, m))
        tau = 50 * (1 - rng.random(count))
        diag = np.diagonal(u, axis1=-2, axis2=-1)
        off = u - np.einsum("...i,ij->...ij", diag, np.eye(m))
        lhs = g_trace(u, tau) - np.sum(g_scalar(diag, tau[:, None]), -1) / tau
        rhs = np.sum(off * off, axis=(-2, -1)) / (2 * tau)
        _collect(res, rhs - lhs, {"U": u, "tau": tau})
    return res


def lipschitz(samples: int, seed: int) -> SuiteResult:
    """|S(tau)V1 - S(tau)V2| <= e^{(1+3m) tau} |V1 - V2| for |V_i| <= sqrt(m), tau in (0, 2]."""
    rng = rng_from_seed(seed)
    res = SuiteResult("lipschitz", "|S(tau)V1 - S(tau)V2|_F <= e^{(1+3m)tau} |V1 - V2|_F", samples, math.inf)
    for m, count in _split_by_m(rng, samples):
        v1 = _admissible(rng, count, m)
        v2 = _admissible(rng, count, m)
        tau = 2 * (1 - rng.random(count))
        decay2 = np.exp(-2 * tau)[:, None]
        flow1 = smallmat.apply_singular_function(v1, lambda s: _flow_factor(s, decay2))
        flow2 = smallmat.apply_singular_function(v2, lambda s: _flow_factor(s, decay2))
        lhs = smallmat.frobenius_norm(flow1 - flow2)
        rhs = np.exp((1 + 3 * m) * tau) * smallmat.frobenius_norm(v1 - v2)
        _collect(res, rhs - lhs, {"V1": v1, "V2": v2, "tau": tau})
    return res


def _admissible(rng: np.random.Generator, count: int, m: int) -> np.ndarray:
    # random direction, Frobenius radius uniform in [0, sqrt(m)]
    v = rng.standard_normal((count, m, m))
    v /= np.linalg.norm(v, axis=(-2, -1), keepdims=True)
    return v * (math.sqrt(m) * rng.random((count, 1, 1)))


def g_curvature(samples: int, seed: int, step: float = 1e-3) -> SuiteResult:
    """Central second difference of g is <= 1 + 1e-6."""
    rng = rng_from_seed(seed)
    res = SuiteResult("g-curvature", "g''(lambda) <= 1", samples, math.inf)
    lam = rng.uniform(-5, 5, samples)
    tau = 50 * (1 - rng.random(samples))
    second = (g_scalar(lam + step, tau) - 2 * g_scalar(lam, tau) + g_scalar(lam - step, tau)) / step**2
    _collect(res, 1 - second, {"lambda": lam, "tau": tau}, slack=1e-6)
    return res


def nuclear_convexity(samples: int, seed: int) -> SuiteResult:
    """h(M) = Tr (I + M M^T)^{1/2} is convex along random segments."""
    rng = rng_from_seed(seed)
    res = SuiteResult("convexity", "h(lA + (1-l)B) <= l h(A) + (1-l) h(B)", samples, math.inf)

    def h(x):
        return np.sum(np.sqrt(1 + smallmat.singular_values(x) ** 2), -1)

    for m, count in _split_by_m(rng, samples):
        a = rng.uniform(-3, 3, (count, m, m))
        b = rng.uniform(-3, 3, (count, m, m))
        lam = rng.uniform(0, 1, count)
        mix = lam[:, None, None] * a + (1 - lam[:, None, None]) * b
        _collect(res, lam * h(a) + (1 - lam) * h(b) - h(mix), {"A": a, "B": b, "lambda": lam})
    return res


def projection_limit(samples: int, seed: int, t_tilde: float = 0.1, eps: float = 0.05) -> SuiteResult:
    """Rescaled flow equals the orthogonal projection to 1e-8 when sigma_min >= 0.1."""
    rng = rng_from_seed(seed)
    res = SuiteResult("projection-limit", "|S_eps(t) U - P(U)|_F <= 1e-8", samples, math.inf)
    u = nonsingular_2x2(rng, samples)
    err = smallmat.frobenius_norm(nonlinear_flow_rescaled(u, t_tilde, eps) - project_orthogonal(u))
    _collect(res, 1e-8 - err, {"U": u}, slack=0.0)
    return res


def nonsingular_2x2(rng: np.random.Generator, count: int, sigma_min: float = 0.1) -> np.ndarray:
    """Random 2x2 matrices with prescribed singular values in [sigma_min, 2]."""
    def rot(a):
        c, s = np.cos(a), np.sin(a)
        return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)

    sig = rng.uniform(sigma_min, 2.0, (count, 2))
    p = rot(rng.uniform(0, 2 * np.pi, count))
    q = rot(rng.uniform(0, 2 * np.pi, count))
    # random reflection on one side so both determinant signs occur
    p[rng.random(count) < 0.5, :, 1] *= -1
    return np.einsum("nik,nk,njk->nij", p, sig, q)


SUITES = {
    "trace-inequality": trace_inequality,
    "g-lower-bound": g_lower_bound,
    "g-upper-bound": g_upper_bound,
    "lipschitz": lipschitz,
    "g-curvature": g_curvature,
    "convexity": nuclear_convexity,
    "projection-limit": projection_limit,
}


def run_all(samples: int, seed: int) -> list[SuiteResult]:
    return [fn(samples, seed + i) for i, fn in enumerate(SUITES.values())]
