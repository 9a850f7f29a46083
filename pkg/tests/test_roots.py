import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hydrotorus.exact import RationalPoly, sturm_real_root_count
from hydrotorus.roots import (
    RootClass,
    RootSet,
    classify_roots,
    solve,
    solve_cubic,
    solve_quadratic,
    solve_quartic,
)


def residual_ok(c, rs):
    scale = max(abs(x) for x in c)
    n = len(c) - 1
    for z in rs.roots():
        val = sum(ck * z**k for k, ck in enumerate(c))
        assert abs(val) <= 1e-10 * scale * max(1.0, abs(z)) ** n


def test_cubic_examples():
    rs = solve_cubic([0, -1, 0, 1])
    assert np.allclose(rs.real_roots, [-1, 0, 1], atol=1e-14)
    rs = solve_cubic([0, 1, 0, 1])
    assert rs.real_roots == (0.0,) or abs(rs.real_roots[0]) < 1e-15
    assert len(rs.complex_pairs) == 1
    assert rs.complex_pairs[0] == pytest.approx((0.0, 1.0), abs=1e-14)
    rs = solve_cubic([0, -2, -3, 1])
    s17 = math.sqrt(17)
    assert np.allclose(rs.real_roots, [(3 - s17) / 2, 0, (3 + s17) / 2], atol=1e-14)


def test_quartic_examples():
    rs = solve_quartic([-4, 0, -3, 0, 1])
    assert np.allclose(rs.real_roots, [-2, 2], atol=1e-14)
    assert rs.complex_pairs[0] == pytest.approx((0, 1), abs=1e-14)
    rs = solve_quartic([-1, 0, 0, 0, 1])
    assert np.allclose(rs.real_roots, [-1, 1], atol=1e-14)
    assert rs.complex_pairs[0] == pytest.approx((0, 1), abs=1e-14)


def test_symmetric_family_k1_root_count_matches_sturm():
    # s^4 + 2 s^3 - 6 s^2 - 2 s - 1: the exact count is 2, not 4
    c = [-1, -2, -6, 2, 1]
    rs = solve_quartic(c)
    assert len(rs.real_roots) == sturm_real_root_count(RationalPoly(c)) == 2
    # the form with constant term +1 has four
    c = [1, -2, -6, 2, 1]
    assert len(solve_quartic(c).real_roots) == 4


def test_quadratic_and_dispatch():
    rs = solve_quadratic([2, -3, 1])
    assert np.allclose(rs.real_roots, [1, 2])
    assert solve([1, 0, 1]).complex_pairs == ((0.0, 1.0),)
    with pytest.raises(ValueError):
        solve([1, 2, 3, 4, 5, 6])
    with pytest.raises(ValueError):
        solve_cubic([0, 0, 0, 0])


def test_degree_drop_is_degenerate():
    rs = solve_cubic([1, 2, 1, 0])
    assert rs.degree_drop
    assert classify_roots(rs) is RootClass.DEGENERATE


def test_classify_examples():
    assert classify_roots(RootSet((-2.0, 2.0), ((0.0, 1.0),), 4)) is RootClass.ELLIPTIC
    assert classify_roots(RootSet((-1.0, 0.0, 1.0), (), 3)) is RootClass.HYPERBOLIC
    assert classify_roots(RootSet((1.0, 1.0 + 1e-9), (), 2), tol=1e-7) is RootClass.DEGENERATE
    assert classify_roots(RootSet((), ((0.0, 1.0), (1.0, 2.0)), 4)) is RootClass.DEGENERATE
    with pytest.raises(ValueError):
        classify_roots(RootSet((), (), 0), tol=0)


coef = st.floats(-10, 10, allow_nan=False)


@given(st.lists(coef, min_size=5, max_size=5).filter(lambda c: abs(c[4]) > 1e-3))
def test_quartic_residual_and_closure(c):
    rs = solve_quartic(c)
    assert rs.count == 4
    assert all(b > 0 for _, b in rs.complex_pairs)
    assert list(rs.real_roots) == sorted(rs.real_roots)
    residual_ok(c, rs)


@given(st.lists(coef, min_size=4, max_size=4).filter(lambda c: abs(c[3]) > 1e-3))
def test_cubic_residual(c):
    rs = solve_cubic(c)
    assert rs.count == 3
    residual_ok(c, rs)


@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4))
def test_reconstruction_from_roots(roots):
    c = np.poly(roots)[::-1]
    rs = solve_quartic(c)
    if rs.condition < 1e6:
        back = np.poly(rs.roots())[::-1].real
        assert np.allclose(back, c / c[-1], rtol=1e-8, atol=1e-8 * np.max(np.abs(c)))


def test_real_count_agrees_with_sturm_on_random_rationals():
    rng = np.random.default_rng(3)
    checked = 0
    while checked < 1000:
        c = [int(x) for x in rng.integers(-9, 10, 5)]
        if c[4] == 0:
            continue
        p = RationalPoly(c)
        if p.deriv().degree < 0 or (p % p.deriv()).is_zero():
            continue
        rs = solve_quartic(c)
        if classify_roots(rs, 1e-6) is RootClass.DEGENERATE:
            continue
        assert len(rs.real_roots) == sturm_real_root_count(p)
        checked += 1


def test_cubic_with_subnormal_linear_term():
    rs = solve_cubic([0.0, 2.225073858507203e-309, 0.0, -1.0])
    w = math.sqrt(2.225073858507203e-309)
    assert sorted(z.real for z in rs.roots()) == pytest.approx([-w, 0.0, w], abs=1e-300)
