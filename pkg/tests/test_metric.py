import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hydrotorus.expr import ExpressionError, Profile, parse
from hydrotorus.metric import (
    ConformalMetric,
    LiouvilleSpec,
    SemiGeodesicMetric,
    TorusPoint,
    constant_field,
    expr_field,
    field_from_samples,
    liouville_conformal_factor,
    metric_positivity_scan,
)
from oracles import central_diff

LIOUVILLE_DIAG = LiouvilleSpec.from_strings("2+cos(2*pi*xi)", "2+sin(2*pi*xi)", (1, 1, 1, -1))


def jet_matches_fd(field, u1, u2, h=1e-5, rel=1e-6):
    j = field.jet(u1, u2)
    pairs = [
        (j.d1, central_diff(lambda s: field(s, u2), u1, h)),
        (j.d2, central_diff(lambda s: field(u1, s), u2, h)),
        (j.d11, central_diff(lambda s: field.jet(s, u2).d1, u1, h)),
        (j.d12, central_diff(lambda s: field.jet(u1, s).d1, u2, h)),
        (j.d22, central_diff(lambda s: field.jet(u1, s).d2, u2, h)),
    ]
    for exact, fd in pairs:
        assert abs(exact - fd) <= rel * max(1.0, abs(exact))


def test_parse_rejects_unknown_names():
    with pytest.raises(ExpressionError):
        parse("foo(q1)")
    with pytest.raises(ExpressionError):
        parse("y + 1")
    with pytest.raises(ExpressionError):
        parse("xi", "field")
    assert float(parse("2^3")) == 8.0


def test_torus_point_reduction():
    p = TorusPoint(1.25, -0.5).reduced((1.0, 2.0))
    assert p == pytest.approx((0.25, 1.5))


def test_liouville_constants():
    spec = LiouvilleSpec.from_strings("1", "2", (1, 1, 1, -1))
    m = liouville_conformal_factor(spec)
    u = np.random.default_rng(0).uniform(0, 1, (2, 50))
    assert np.all(m.lam(*u) == 3.0)


def test_liouville_symmetric_point():
    spec = LiouvilleSpec.from_strings("2+cos(2*pi*xi)", "0", (1, 1, 1, -1))
    m = liouville_conformal_factor(spec)
    j = m.lam.jet(0.0, 0.0)
    assert j.value == pytest.approx(3.0, abs=1e-15)
    assert j.d2 == pytest.approx(0.0, abs=1e-15)


def test_liouville_derivatives_match_fd():
    m = liouville_conformal_factor(LIOUVILLE_DIAG)
    rng = np.random.default_rng(1)
    for u1, u2 in rng.uniform(0, 1, (100, 2)):
        jet_matches_fd(m.lam, u1, u2)


def test_liouville_rejects_bad_directions():
    with pytest.raises(ValueError, match="orthogonal"):
        liouville_conformal_factor(LiouvilleSpec.from_strings("1", "1", (1, 1, 1, 1)))
    with pytest.raises(ValueError, match="not positive"):
        liouville_conformal_factor(LiouvilleSpec.from_strings("cos(2*pi*xi)", "0", (1, 0, 0, 1)))


def test_liouville_swap_commutes():
    a = liouville_conformal_factor(LIOUVILLE_DIAG)
    b = liouville_conformal_factor(LIOUVILLE_DIAG.swapped())
    u = np.random.default_rng(2).uniform(0, 1, (2, 200))
    assert np.max(np.abs(a.lam(*u) - b.lam(*u))) <= 1e-14


def test_liouville_positivity_minimum():
    # cos and sin reach -1 together: xi1 = 1/2 and xi2 = 3/4 at (q1, q2) = (1/8, 3/8)
    rep = metric_positivity_scan(liouville_conformal_factor(LIOUVILLE_DIAG), (1024, 1024))
    assert rep.passed
    assert rep.minimum == pytest.approx(2.0, abs=1e-12)
    lam = liouville_conformal_factor(LIOUVILLE_DIAG).lam
    assert lam(0.125, 0.375) == pytest.approx(2.0, abs=1e-14)


def test_positivity_scan_flags_negative():
    rep = metric_positivity_scan(SemiGeodesicMetric(expr_field("1 + 2*sin(2*pi*x)")), (64, 64))
    assert not rep.passed and rep.minimum < 0
    rep = metric_positivity_scan(ConformalMetric(constant_field(3.0)), (8, 8))
    assert rep.passed and rep.minimum == 3.0


def test_samples_constant_grid():
    f = field_from_samples(np.full((16, 16), 5.0))
    j = f.jet(0.37, 0.81)
    assert j.value == pytest.approx(5.0, abs=1e-14)
    assert max(abs(v) for v in j[1:]) <= 1e-12


def test_samples_sine_derivative():
    n = 64
    L = 2.0
    x = np.arange(n) * L / n
    vals = np.tile(np.sin(2 * np.pi * x / L), (n, 1))  # varies along the second axis
    f = field_from_samples(vals, (L, L))
    worst = 0.0
    for j in range(n):
        worst = max(worst, abs(f.jet(0.0, x[j]).d2 - (2 * np.pi / L) * np.cos(2 * np.pi * x[j] / L)))
    assert worst <= 1e-6


def test_samples_errors():
    with pytest.raises(ValueError, match="grid too small"):
        field_from_samples(np.ones((4, 4)))
    bad = np.ones((8, 8))
    bad[2, 3] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        field_from_samples(bad)


@given(st.floats(0, 1), st.floats(0, 2))
def test_fields_are_periodic(u1, u2):
    f = expr_field("2 + sin(2*pi*q1)*cos(pi*q2) + 0.3*cos(2*pi*(q1 - q2))", (1.0, 2.0))
    assert abs(f(u1, u2) - f(u1 + 1.0, u2)) <= 1e-12
    assert abs(f(u1, u2) - f(u1, u2 + 2.0)) <= 1e-12


def test_expression_jet_matches_fd():
    f = expr_field("exp(0.3*sin(2*pi*t))*(2 + cos(2*pi*x))")
    rng = np.random.default_rng(4)
    for u1, u2 in rng.uniform(0, 1, (100, 2)):
        jet_matches_fd(f, u1, u2)


def test_profile_derivatives():
    p = Profile.from_string("2+0.3*sin(2*pi*xi)")
    f, d1, d2 = p.derivs(0.1)
    assert d1 == pytest.approx(0.6 * math.pi * math.cos(0.2 * math.pi), rel=1e-14)
    assert d2 == pytest.approx(-1.2 * math.pi**2 * math.sin(0.2 * math.pi), rel=1e-14)
