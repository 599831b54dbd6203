import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from macsplit import smallmat
from macsplit.dynamics import (
    GCoefficients,
    g_scalar,
    g_trace,
    nonlinear_flow,
    nonlinear_flow_rescaled,
    ode_oracle_rk4,
    project_orthogonal,
)
from macsplit.errors import UsageError


def random_orthogonal(rng, m, count=None):
    shape = (m, m) if count is None else (count, m, m)
    q, r = np.linalg.qr(rng.standard_normal(shape))
    return q * np.sign(np.diagonal(r, axis1=-2, axis2=-1))[..., None, :]


def admissible(rng, count, m):
    v = rng.standard_normal((count, m, m))
    v /= np.linalg.norm(v, axis=(-2, -1), keepdims=True)
    return v * math.sqrt(m) * rng.random((count, 1, 1))


class TestNonlinearFlow:
    def test_scalar_closed_form(self):
        # u' = u - u^3, u(0) = 1/2: u(t)^2 = 1 / (1 + 3 e^{-2t})
        out = nonlinear_flow(np.array([[0.5]]), math.log(2))
        assert out[0, 0] == pytest.approx(0.7559289460184544, rel=1e-14)
        assert out[0, 0] == pytest.approx(1 / math.sqrt(1.75), rel=1e-14)

    def test_zero_and_orthogonal_fixed_points(self, rng):
        assert np.array_equal(nonlinear_flow(np.zeros((3, 3)), 2.0), np.zeros((3, 3)))
        q = random_orthogonal(rng, 3, 10)
        np.testing.assert_allclose(nonlinear_flow(q, 5.0), q, atol=1e-14)

    def test_zero_time(self, rng):
        u = rng.standard_normal((4, 2, 2))
        assert np.array_equal(nonlinear_flow(u, 0.0), u)

    def test_negative_time(self):
        with pytest.raises(UsageError):
            nonlinear_flow(np.eye(2), -0.1)

    def test_against_rk4(self, rng):
        u0 = admissible(rng, 200, 3)
        err = np.linalg.norm(nonlinear_flow(u0, 0.3) - ode_oracle_rk4(u0, 0.3, 1e-3), axis=(-2, -1))
        assert err.max() <= 1e-8

    def test_against_rk4_outside_ball(self, rng):
        u0 = rng.uniform(-3, 3, (50, 2, 2))
        err = np.linalg.norm(nonlinear_flow(u0, 0.5) - ode_oracle_rk4(u0, 0.5, 1e-4), axis=(-2, -1))
        assert err.max() <= 1e-8

    def test_semigroup(self, rng):
        u0 = rng.uniform(-2, 2, (100, 3, 3))
        two = nonlinear_flow(nonlinear_flow(u0, 0.2), 0.35)
        np.testing.assert_allclose(two, nonlinear_flow(u0, 0.55), atol=1e-12)

    def test_orthogonal_invariance(self, rng):
        u0 = rng.uniform(-2, 2, (50, 3, 3))
        a = random_orthogonal(rng, 3, 50)
        b = random_orthogonal(rng, 3, 50)
        lhs = nonlinear_flow(a @ u0 @ b, 0.7)
        np.testing.assert_allclose(lhs, a @ nonlinear_flow(u0, 0.7) @ b, atol=1e-12)

    def test_maximum_bound(self, rng):
        for m in (1, 2, 3, 4):
            u0 = admissible(rng, 500, m)
            for t in (0.01, 1.0, 100.0, 1e5):
                out = nonlinear_flow(u0, t)
                assert np.linalg.norm(out, axis=(-2, -1)).max() <= math.sqrt(m) + 1e-12
                assert np.all(np.isfinite(out))

    def test_long_time_is_projection(self, rng):
        u0 = random_orthogonal(rng, 2, 20) @ np.diag([2.0, 0.3])
        np.testing.assert_allclose(nonlinear_flow(u0, 1e4), project_orthogonal(u0), atol=1e-14)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.0, 2.0), st.floats(0.01, 3.0), st.floats(0.01, 3.0))
    def test_singular_values_monotone_toward_one(self, sigma, t1, extra):
        a = nonlinear_flow(np.array([[sigma]]), t1)[0, 0]
        b = nonlinear_flow(np.array([[sigma]]), t1 + extra)[0, 0]
        assert abs(b - 1) <= abs(a - 1) + 1e-15
        assert abs(a - 1) <= abs(sigma - 1) + 1e-15


class TestRescaledAndProjection:
    def test_rescaled_is_time_change(self, rng):
        u0 = rng.standard_normal((10, 2, 2))
        np.testing.assert_array_equal(nonlinear_flow_rescaled(u0, 0.02, 0.5), nonlinear_flow(u0, 0.08))

    def test_limit(self, rng):
        sig = rng.uniform(0.1, 2.0, (500, 2))
        p = random_orthogonal(rng, 2, 500)
        q = random_orthogonal(rng, 2, 500)
        u = np.einsum("nik,nk,njk->nij", p, sig, q)
        err = np.linalg.norm(nonlinear_flow_rescaled(u, 0.1, 0.05) - project_orthogonal(u), axis=(-2, -1))
        assert err.max() <= 1e-8

    def test_examples(self):
        np.testing.assert_allclose(project_orthogonal(3 * np.eye(2)), np.eye(2), atol=1e-15)
        np.testing.assert_allclose(project_orthogonal(np.diag([2.0, -0.5])), np.diag([1.0, -1.0]), atol=1e-15)
        rot = np.array([[0.0, -2.0], [2.0, 0.0]])
        np.testing.assert_allclose(project_orthogonal(rot), rot / 2, atol=1e-15)

    def test_idempotent(self, rng):
        p = project_orthogonal(rng.standard_normal((100, 3, 3)))
        np.testing.assert_allclose(project_orthogonal(p), p, atol=1e-12)


class TestG:
    def test_scalar_value(self):
        assert g_scalar(1.0, math.log(2)) == pytest.approx(-1 / 6, rel=1e-14)
        assert g_scalar(0.0, 0.3) == 0

    def test_naive_formula_moderate_tau(self, rng):
        lam = rng.uniform(-3, 3, 200)
        for tau in (0.05, 0.5, 3.0):
            naive = lam**2 / 2 - math.exp(tau) / math.expm1(2 * tau) * (np.sqrt(1 + math.expm1(2 * tau) * lam**2) - 1)
            np.testing.assert_allclose(g_scalar(lam, tau), naive, rtol=1e-11, atol=1e-13)

    def test_trace_orthogonal(self, rng):
        tau = math.log(2)
        q = random_orthogonal(rng, 2)
        assert g_trace(q, tau) == pytest.approx(-0.4808983469629878, rel=1e-13)
        assert g_trace(q, tau) == pytest.approx(2 * (-1 / 6) / tau, rel=1e-13)

    def test_trace_of_diagonal(self, rng):
        lam = rng.uniform(-2, 2, 3)
        tau = 0.8
        assert tau * g_trace(np.diag(lam), tau) == pytest.approx(np.sum(g_scalar(lam, tau)), rel=1e-13)

    def test_trace_orthogonally_invariant(self, rng):
        u = rng.standard_normal((20, 3, 3))
        a = random_orthogonal(rng, 3, 20)
        np.testing.assert_allclose(g_trace(a @ u, 1.3), g_trace(u, 1.3), rtol=1e-12)

    def test_lower_bound(self, rng):
        for m in (1, 2, 3):
            u = rng.uniform(-2, 2, (2000, m, m))
            tau = rng.uniform(1e-3, 50, 2000)
            assert np.all(g_trace(u, tau) >= -m / 4 - 1e-10)

    def test_large_tau_finite(self):
        for tau in (100.0, 400.0, 700.0, 1e4):
            val = g_scalar(np.array([0.0, 0.5, 1.0, 3.0]), tau)
            assert np.all(np.isfinite(val))
            np.testing.assert_allclose(val, [0, 0.125 - 0.5, 0.5 - 1, 4.5 - 3], atol=1e-12)

    def test_curvature_at_most_one(self, rng):
        lam = rng.uniform(-4, 4, 5000)
        tau = rng.uniform(1e-3, 50, 5000)
        h = 1e-3
        second = (g_scalar(lam + h, tau) - 2 * g_scalar(lam, tau) + g_scalar(lam - h, tau)) / h**2
        assert second.max() <= 1 + 1e-6

    def test_bad_tau(self):
        with pytest.raises(UsageError):
            g_scalar(1.0, 0.0)


class TestCoefficients:
    def test_values(self):
        co = GCoefficients.from_tau(math.log(2))
        assert co.c1 == pytest.approx(1 / (2 * math.log(2)))
        assert co.c2 == pytest.approx(2 / (3 * math.log(2)), rel=1e-14)
        assert co.beta == pytest.approx(3.0, rel=1e-14)

    @pytest.mark.parametrize("tau", [1e-8, 1e-3, 1.0, 50.0, 300.0, 700.0])
    def test_finite_c2(self, tau):
        co = GCoefficients.from_tau(tau)
        assert math.isfinite(co.c1) and math.isfinite(co.c2) and co.c2 > 0

    def test_beta_overflow_reported(self):
        assert math.isinf(GCoefficients.from_tau(700.0).beta)

    def test_nonpositive(self):
        with pytest.raises(UsageError):
            GCoefficients.from_tau(-1.0)


def test_rk4_oracle_scalar():
    exact = 1 / math.sqrt(1 + 3 * math.exp(-2 * 0.4))
    assert ode_oracle_rk4(np.array([[0.5]]), 0.4, 1e-3)[0, 0] == pytest.approx(exact, rel=1e-12)
