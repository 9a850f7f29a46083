import numpy as np
import pytest
import sympy as sp

from hydrotorus import reducibility as red
from hydrotorus.integral import CONFORMAL, IntegralCoeffs, bracket_residual
from hydrotorus.metric import LiouvilleSpec, SemiGeodesicMetric, constant_field, expr_field

PROFILE = "1 + 0.3*sin(2*pi*xi)"
SPEC = LiouvilleSpec.from_strings("2+cos(2*pi*xi)", "2+sin(2*pi*xi)", (1, 0, 0, 1))


def test_simple_wave_constants():
    c1, c2, c3 = red.simple_wave_constants(2.0)
    assert (c1, c2, c3) == (0.375, 0.0625, 0.0)
    sol = red.simple_wave(2.0, PROFILE)
    assert sol.k1 == 0.0625 and sol.k2 == 0.25
    one = red.simple_wave(1.0, PROFILE)
    assert (one.c1, one.c2, one.k2) == (0.0, 0.0, 1.0)


def test_simple_wave_rejects_flat_and_nonpositive():
    with pytest.raises(red.FlatCaseError, match="flat case"):
        red.simple_wave(0.0, PROFILE)
    with pytest.raises(ValueError):
        red.simple_wave(2.0, "sin(2*pi*xi)")


@pytest.mark.parametrize("lam", [1.0, 2.0, 3.0, -1.5])
def test_simple_wave_residuals(lam):
    sol = red.simple_wave(lam, PROFILE)
    res = red.simple_wave_residuals(sol, np.arange(256) / 256)
    assert res["ode"] <= 1e-8
    assert res["eigenvector"] <= 1e-8
    assert res["elimination"] <= 1e-8


@pytest.mark.parametrize("lam", [1.0, 2.0, 3.0, -1.5])
def test_simple_wave_is_integral(lam):
    sol = red.simple_wave(lam, PROFILE)
    metric = sol.metric()
    for F in (sol.integral(), sol.linear_integral()):
        for p in [(0.1, 0.2), (0.37, 0.81), (0.9, 0.05)]:
            assert np.max(np.abs(bracket_residual(F, metric, p))) <= 1e-10


@pytest.mark.parametrize("lam", [1.0, 2.0, 3.0, -1.5])
def test_cubic_identity(lam):
    cert = red.verify_cubic_identity(red.simple_wave(lam, PROFILE))
    assert cert.passed and cert.residual <= 1e-12
    d = cert.to_dict()
    assert d["degree"] == 3 and d["passed"]


def test_cubic_identity_negative_controls():
    sol = red.simple_wave(2.0, PROFILE)
    bad = red.verify_cubic_identity(sol, k2=sol.k2 + 1e-3)
    assert not bad.passed and bad.residual > 1e-4
    wrong = red.verify_cubic_identity(sol, k1=1 / 24)
    assert wrong.residual > 0.1


def _liouville_quartic(k):
    """k1 F2^2 + 2 k2 H F2 + 4 k3 H^2 as a conformal quartic integral."""
    F2 = red.liouville_quadratic_integral(SPEC)
    lam = SPEC.lambda_expr()
    b = [c.expr for c in F2.coeffs]
    E = [1 / lam, 0, 1 / lam]

    def mul(u, v):
        out = [0] * (len(u) + len(v) - 1)
        for i, x in enumerate(u):
            for j, y in enumerate(v):
                out[i + j] += x * y
        return out

    terms = [mul(b, b), mul(E, b), mul(E, E)]
    coeffs = [sum(kk * t[i] for kk, t in zip(k, terms)) for i in range(5)]
    return IntegralCoeffs(4, tuple(expr_field(sp.simplify(c)) for c in coeffs), CONFORMAL), F2


@pytest.mark.parametrize("k", [(1, 0, 0), (1, 1, 1), (0.5, -2, 3)])
def test_quartic_identity_liouville(k):
    F4, F2 = _liouville_quartic(k)
    metric = red.conformal_metric_of(SPEC)
    cert = red.verify_quartic_identity(F4, F2, metric)
    assert cert.passed and cert.residual <= 1e-10
    got = [cert.constants[n] for n in ("k1", "k2", "k3")]
    assert got == pytest.approx(k, abs=1e-10)


def test_quartic_identity_singular_when_f2_is_energy():
    metric = SemiGeodesicMetric(constant_field(1.0))
    F4 = IntegralCoeffs.constant((1, 0, 2, 0, 1))
    F2 = IntegralCoeffs.constant((1, 0, 1))
    with pytest.raises(np.linalg.LinAlgError):
        red.verify_quartic_identity(F4, F2, metric)


def test_quartic_identity_rejects_non_integral():
    metric = red.conformal_metric_of(SPEC)
    F4, _ = _liouville_quartic((1, 0, 0))
    bogus = IntegralCoeffs.from_strings(("sin(2*pi*t)", 0, 1), CONFORMAL)
    with pytest.raises(ValueError, match="not an integral"):
        red.verify_quartic_identity(F4, bogus, metric)


def test_factorization_recovers_quadratic():
    rng = np.random.default_rng(3)
    for _ in range(50):
        alpha, beta, r = rng.uniform(-2, 2), rng.uniform(0.1, 2), rng.uniform(-1, 1)
        K = np.array([alpha**2 + beta**2, -2 * alpha, 1.0])
        M = rng.uniform(-2, 2, 3)
        a = np.convolve(K, M) + r * np.array([1, 0, 2, 0, 1])
        fac = red.factor_quartic_elliptic(a, r, alpha, beta)
        assert fac.ok and np.allclose(fac.M, M, atol=1e-10)
        assert not fac.proportional_to_H


def test_factorization_proportional_to_energy_branch():
    a = np.convolve([1, 0, 1], [2, 0.5, -1]) + 0.3 * np.array([1, 0, 2, 0, 1])
    fac = red.factor_quartic_elliptic(a, 0.3, 0.0, 1.0)
    assert fac.proportional_to_H and np.allclose(fac.M, [2, 0.5, -1])


def test_factorization_flags_generic_quartic():
    rng = np.random.default_rng(4)
    with pytest.raises(ValueError, match="not divisible"):
        red.factor_quartic_elliptic(rng.uniform(-1, 1, 5), 0.2, 0.5, 0.7)


def test_conformal_residuals_liouville():
    A, B, b1 = red.liouville_complex_coefficients(SPEC)
    res = red.conformal_residuals(red.conformal_metric_of(SPEC).lam, quadratic=(A, B), b1=b1)
    assert res.second_order <= 1e-10
    assert res.first_order <= 1e-10


def test_conformal_residuals_linear():
    lam = expr_field("2 + sin(2*pi*(t - x))")
    res = red.conformal_residuals(lam, linear=(1.0, 1.0))
    assert res.linear <= 1e-12
    assert res.direction == (1.0, -1.0)
    off = red.conformal_residuals(lam, linear=(1.0, 0.0))
    assert off.linear > 0.1
