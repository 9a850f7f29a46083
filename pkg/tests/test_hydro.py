import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hydrotorus.hydro import (
    KAPPA,
    build_matrix_A,
    eigen_crosscheck,
    elliptic_pde_residual,
    gamma_hat,
    genuine_nonlinearity,
    invariant_at,
    invariant_matrix,
    jacobian_da_dr,
    point_analysis,
    remainder_gamma,
    riemann_invariants,
    root_sensitivity,
    viete_parametrization,
)
from hydrotorus.integral import HatPoly, hat_polys
from hydrotorus.roots import RootClass, solve_cubic, solve_quartic
from oracles import (
    fd_dlam_dr,
    g4_coeffs,
    invariants_at_roots,
    matched_roots,
    random_elliptic_quartic,
    reconstruct_coefficients,
)

SQ17 = math.sqrt(17)


def test_matrix_examples():
    assert np.array_equal(build_matrix_A((0, 0, 1, 1), 3), [[0, 0, 0], [1, 0, 2], [0, 1, 3]])
    a0, a1, a2 = 0.4, -1.1, 2.3
    A = build_matrix_A((a0, a1, a2, 1), 3)
    assert np.allclose(A, [[0, 0, a1], [a2, 0, 2 * a2 - 3 * a0], [0, a2, 3 - 2 * a1]])
    A4 = build_matrix_A((0, 0, 0, 1, 1), 4)
    assert np.array_equal(A4[:, 3], [0, 0, 3, 4])
    assert np.array_equal(np.diag(A4, -1), [1, 1, 1])
    with pytest.raises(ValueError):
        build_matrix_A((1, 2), 1)


def test_eigen_crosscheck_flat_case():
    a = (0, 0, 1, 1)
    _, G = hat_polys(a, 3)
    rs = solve_cubic(G.coeffs)
    assert eigen_crosscheck(build_matrix_A(a, 3), 1.0, rs) <= 1e-12
    ev = np.sort(np.linalg.eigvals(build_matrix_A(a, 3)).real)
    assert np.allclose(ev, [(3 - SQ17) / 2, 0, (3 + SQ17) / 2])


def test_eigen_scaling_with_g():
    a = (0.3, -0.4, 2.0, 1.0)
    _, G = hat_polys(a, 3)
    rs = solve_cubic(G.coeffs)
    ev = np.sort_complex(np.linalg.eigvals(build_matrix_A(a, 3)))
    assert np.allclose(ev, np.sort_complex(2.0 * np.array(rs.roots())))


@pytest.mark.parametrize("n", [3, 4])
def test_eigen_crosscheck_random(n):
    rng = np.random.default_rng(n)
    worst = 0.0
    for _ in range(1000):
        g = rng.uniform(0.5, 3)
        a = list(rng.uniform(-2, 2, n - 1)) + [g, 1.0]
        rs, _ = point_analysis(a, g)
        worst = max(worst, eigen_crosscheck(build_matrix_A(a, n), g, rs))
    assert worst <= 1e-9


def test_invariant_examples():
    assert invariant_at(HatPoly((1, 0, 2, 0, 1)), 0.7, 4) == pytest.approx(1.0)
    a = (0, 0, 1, 1)
    F, G = hat_polys(a, 3)
    data = riemann_invariants(F, solve_cubic(G.coeffs), 1.0, 3)
    rec = {round(r.s.real, 12): r for r in data.records}
    assert rec[0.0].r == 0
    s = (3 + SQ17) / 2
    want = (s * s + s**3) / (1 + s * s) ** 1.5
    assert want == pytest.approx(1.14298502807464, abs=1e-13)
    got = [r for r in data.records if abs(r.s.real - s) < 1e-9][0]
    assert got.r.real == pytest.approx(want, rel=1e-14)
    assert data.cls is RootClass.HYPERBOLIC


def test_invariants_reject_roots_at_i():
    F = HatPoly((1, 0, 1, 0))
    from hydrotorus.roots import solve_cubic as sc

    rs = sc((0, 1, 0, 1))  # roots 0, +-i
    with pytest.raises(ValueError, match="divisible by H"):
        riemann_invariants(F, rs, 1.0, 3)


def test_cubic_pair_stores_square():
    a = (1.0, 2.0, 1.0, 1.0)
    rs, data = point_analysis(a, 1.0)
    pair = data.pair_record()
    assert pair is not None
    F, _ = hat_polys(a, 3)
    assert pair.r_squared == pytest.approx(F(pair.s) ** 2 / (1 + pair.s**2) ** 3, rel=1e-13)


def test_quartic_conjugate_invariants():
    a = random_elliptic_quartic(np.random.default_rng(0))
    rs, data = point_analysis(list(a) + [0.0], a[3])
    pair = [r for r in data.records if r.s.imag != 0]
    assert pair[0].r == pytest.approx(np.conj(pair[1].r), abs=1e-12)
    assert all(r.r.imag == 0 for r in data.real_records())


def test_root_sensitivity_examples():
    a = (0.0, 1.0, 0.5, 1.0)
    G = HatPoly(g4_coeffs(a))
    dG = G.deriv()
    assert np.allclose(root_sensitivity(a, 0.0) * dG(0.0), [0, 1, 0, 0])
    assert np.allclose(root_sensitivity(a, 1.0) * dG(1.0), [-4, -2, 0, 2])


def test_root_sensitivity_matches_resolve():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = np.array(random_elliptic_quartic(rng))
        roots = np.array(solve_quartic(g4_coeffs(a)).roots())
        s3 = roots[2].real
        sens = root_sensitivity(a, s3)
        for j in range(4):
            ap = a.copy()
            ap[j] += 1e-6
            am = a.copy()
            am[j] -= 1e-6
            fd = (matched_roots(ap, roots)[2].real - matched_roots(am, roots)[2].real) / 2e-6
            assert fd == pytest.approx(sens[j], abs=1e-5 * max(1, abs(sens[j])))


def test_jacobian_inverse_and_closed_entry():
    rng = np.random.default_rng(8)
    for _ in range(50):
        a = random_elliptic_quartic(rng)
        rs = solve_quartic(g4_coeffs(a))
        roots = rs.roots()
        J = jacobian_da_dr(a, rs)
        assert np.allclose(invariant_matrix(roots) @ J, np.eye(4), atol=1e-10)
        s3 = roots[2].real
        S = np.prod([s3 - z for j, z in enumerate(roots) if j != 2]).real
        assert J[3, 2].real == pytest.approx((1 + s3 * s3) ** 2 / S, rel=1e-9)


def test_jacobian_matches_newton_reconstruction():
    rng = np.random.default_rng(9)
    for _ in range(5):
        a = random_elliptic_quartic(rng)
        rs = solve_quartic(g4_coeffs(a))
        roots = np.array(rs.roots())
        J = jacobian_da_dr(a, rs)
        r0 = invariants_at_roots(a, roots)
        h = 1e-6
        tp, tm = r0.copy(), r0.copy()
        tp[2] += h
        tm[2] -= h
        ap, _ = reconstruct_coefficients(a, roots, tp)
        am, _ = reconstruct_coefficients(a, roots, tm)
        assert np.allclose((ap - am) / (2 * h), J[:, 2].real, atol=1e-5)


def test_envelope_property():
    rng = np.random.default_rng(10)
    a = np.array(random_elliptic_quartic(rng))
    roots = np.array(solve_quartic(g4_coeffs(a)).roots())
    M = invariant_matrix(roots)
    for j in range(4):
        ap, am = a.copy(), a.copy()
        ap[j] += 1e-6
        am[j] -= 1e-6
        fd = (invariants_at_roots(ap, matched_roots(ap, roots))
              - invariants_at_roots(am, matched_roots(am, roots))) / 2e-6
        assert np.allclose(fd, M[:, j], atol=1e-5)


def test_viete_sums():
    rng = np.random.default_rng(11)
    for _ in range(100):
        a = random_elliptic_quartic(rng)
        roots = solve_quartic(g4_coeffs(a)).roots()
        assert sum(roots).real == pytest.approx(-2 * a[2] / a[3], abs=1e-9)
        assert np.prod(roots).real == pytest.approx(-a[1] / a[3], abs=1e-9)


def test_genuine_nonlinearity_reference_tuple():
    a = (1.0, 1.0, 1.0, 2.0)
    rs = solve_quartic(g4_coeffs(a))
    reps = genuine_nonlinearity(a, rs)
    roots = np.array(rs.roots())
    for idx, rep in zip((2, 3), reps):
        fd = fd_dlam_dr(a, roots, idx)
        assert rep.dlam_dr == pytest.approx(fd, rel=1e-6)
        assert rep.dlam_dr == pytest.approx(rep.oracle_dlam_dr, rel=1e-9)
        assert rep.gamma == pytest.approx(gamma_hat(a)(rep.s3))
    assert KAPPA == -3


def test_genuine_nonlinearity_vanishes_on_gamma_root():
    vp = viete_parametrization(0.7, 1.3)
    a = vp.coefficients(1.5)
    reps = genuine_nonlinearity(a)
    for rep in reps:
        assert abs(rep.gamma) <= 1e-10
        assert abs(rep.dlam_dr) <= 1e-9
        assert abs(rep.oracle_dlam_dr) <= 1e-8
    assert reps[0].im_r_zero


def test_genuine_nonlinearity_preconditions():
    with pytest.raises(ValueError):
        genuine_nonlinearity((1, 2, 3))
    with pytest.raises(ValueError, match="not elliptic"):
        genuine_nonlinearity((0.0, -1.0, 0.0, 1.0))  # four real roots
    with pytest.raises(ValueError):
        genuine_nonlinearity((1.0, 1.0, 1.0, -2.0))


def test_remainder_gamma_examples():
    gam, R = remainder_gamma((1.0, 1.0, 1.0, 2.0))
    assert gam.coeffs == (-3.0, 4.0, 3.0)
    assert R.coeffs == pytest.approx((-30 / 27, 40 / 27))
    gam, R = remainder_gamma((0.0, 0.7, 1.1, 2.0))
    assert R.coeffs[1] == 0 and R.coeffs[0] == pytest.approx(2 * (0.7 - 2.0))
    assert np.allclose(sorted(np.roots(gam.as_array()[::-1]).real), [-1, 1])
    with pytest.raises(ValueError):
        remainder_gamma((0.0, 1.0, 0.0, -1.0))


def test_viete_reference_values():
    vp = viete_parametrization(1.0, 1.0)
    assert vp.ratios == pytest.approx((-0.75, 2.0, -1.5), abs=1e-15)
    assert vp.mu == pytest.approx((1 + math.sqrt(5)) / 2, rel=1e-15)
    with pytest.raises(ValueError):
        viete_parametrization(0.0, 1.0)


@given(st.floats(0.1, 3).flatmap(lambda m: st.sampled_from([m, -m])), st.floats(0.05, 3))
def test_viete_properties(alpha, beta):
    vp = viete_parametrization(alpha, beta)
    rho = alpha * alpha + beta * beta
    assert rho - 1 == pytest.approx(alpha * (vp.mu - 1 / vp.mu), abs=1e-12 * max(1, rho))
    a = vp.coefficients(1.0)
    F = HatPoly(tuple(a) + (0.0,))
    assert abs(invariant_at(F, complex(alpha, beta), 4).imag) <= 1e-12 * max(1.0, rho**2)
    rs = solve_quartic(g4_coeffs(a))
    if rs.condition < 1e6 and len(rs.complex_pairs) == 1:
        assert rs.complex_pairs[0] == pytest.approx((alpha, beta), abs=1e-8)
        assert sorted(rs.real_roots) == pytest.approx(sorted([vp.mu, -1 / vp.mu]), abs=1e-8)


def test_elliptic_pde_constant_and_discriminant():
    rng = np.random.default_rng(12)
    at = rng.uniform(-2, 2, (32, 32))
    bt = rng.uniform(0.1, 2, (32, 32))
    res = elliptic_pde_residual(np.ones((32, 32)), np.full((32, 32), 0.3), at, bt, (1 / 32, 1 / 32))
    assert res.max_residual <= 1e-12
    assert np.max(np.abs(res.discriminant + 1)) <= 1e-14
    with pytest.raises(ValueError):
        elliptic_pde_residual(np.ones((4, 4)), np.ones((4, 4)), np.ones((4, 4)), np.zeros((4, 4)), (1, 1))


def test_elliptic_pde_laplace_case_second_order():
    errs = []
    for n in (128, 256):
        h = 1.0 / n
        t, x = np.meshgrid(np.arange(n + 1) * h, np.arange(n + 1) * h, indexing="ij")
        v = np.exp(2 * np.pi * x) * np.cos(2 * np.pi * t)
        res = elliptic_pde_residual(np.zeros_like(v), v, np.zeros_like(v), np.ones_like(v), (h, h),
                                    periodic=False)
        errs.append(res.max_residual)
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)
