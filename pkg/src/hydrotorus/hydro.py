"""The quasi-linear system on integral coefficients and its Riemann invariants.

Eigenvalues of the system matrix are ``g * s_i`` for the roots ``s_i`` of the
fibre-derivative polynomial, and the Riemann invariants are the critical values
``r_i = F_hat(s_i) / (1 + s_i^2)^(n/2)``. The quartic-specific routines assume
the canonical form ``a4 = 0`` with ``a3 = g``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .integral import HatPoly, hat_polys
from .roots import RootClass, RootSet, classify_roots, solve_cubic, solve_quartic

# 2 G4_hat - Q = 3 gamma exactly (see exact.speed_identity_factor), so at a root
# of G4_hat Q(s3) = -3 gamma(s3).
SPEED_IDENTITY_FACTOR = 3
KAPPA = -SPEED_IDENTITY_FACTOR

IMAG_TOL = 1e-10


def build_matrix_A(a: Sequence[float], n: int) -> np.ndarray:
    """n x n matrix of ``U_t + A(U) U_x = 0`` for ``U = (a_0, ..., a_{n-1})``."""
    if n not in (3, 4):
        raise ValueError(f"unsupported degree {n}")
    a = [float(v) for v in a]
    if len(a) != n + 1:
        raise ValueError(f"need {n + 1} coefficients")

    def at(i):
        return a[i] if 0 <= i <= n else 0.0

    A = np.zeros((n, n))
    for k in range(1, n):
        A[k, k - 1] = a[n - 1]
    for k in range(n):
        A[k, n - 1] = (k + 1) * at(k + 1) - (n - k + 1) * at(k - 1)
    return A


def eigen_crosscheck(A: np.ndarray, g: float, rs: RootSet) -> float:
    """Max distance between eig(A) and {g s_i}, relative to max(1, |g s_i|)."""
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed: {exc}") from exc
    target = g * np.array(rs.roots())
    if len(target) != len(ev):
        return math.inf
    cost = np.abs(ev[:, None] - target[None, :]) / np.maximum(1.0, np.abs(target))[None, :]
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


# --- Riemann invariants ----------------------------------------------------------


@dataclass(frozen=True)
class RiemannRecord:
    s: complex
    lam: complex
    r: complex
    r_squared: complex

    @property
    def is_real(self) -> bool:
        return abs(self.s.imag) == 0.0


@dataclass(frozen=True)
class RiemannData:
    records: tuple[RiemannRecord, ...]
    cls: RootClass
    degree: int

    def real_records(self) -> list[RiemannRecord]:
        return [r for r in self.records if r.is_real]

    def pair_record(self) -> RiemannRecord | None:
        """The member alpha + i beta (beta > 0) of the complex pair, if any."""
        for r in self.records:
            if r.s.imag > 0:
                return r
        return None


def invariant_at(F: HatPoly, s: complex, n: int) -> complex:
    w = 1.0 + s * s
    return F(s) / (w ** (n // 2) if n % 2 == 0 else cmath.sqrt(w) ** n)


def riemann_invariants(F: HatPoly, rs: RootSet, g: float, n: int,
                       tol: float | None = None) -> RiemannData:
    """Critical values of F on the energy circle at each root of G_hat."""
    recs = []
    for s in rs.roots():
        if abs(s - 1j) < 1e-10 or abs(s + 1j) < 1e-10:
            raise ValueError(
                f"root {s} at +-i: the integral is divisible by H (reducible candidate)"
            )
        r = invariant_at(F, s, n)
        r2 = F(s) ** 2 / (1.0 + s * s) ** n
        if s.imag == 0:
            s, r, r2 = complex(s.real, 0.0), complex(r.real, 0.0), complex(r2.real, 0.0)
        recs.append(RiemannRecord(s, g * s, r, r2))
    cls = classify_roots(rs) if tol is None else classify_roots(rs, tol)
    return RiemannData(tuple(recs), cls, n)


def point_analysis(a: Sequence[float], g: float, tol: float | None = None):
    """Roots, class and invariants for coefficient values at one point."""
    n = len(a) - 1
    F, _ = hat_polys(a, n)
    _, G = hat_polys(canonical(a), n)
    rs = solve_from_hat(G, n)
    return rs, riemann_invariants(F, rs, g, n, tol)


def canonical(a: Sequence[float]) -> tuple:
    if len(a) == 5:
        a0, a1, a2, a3, a4 = a
        return (a0 - a4, a1, a2 - 2 * a4, a3, 0.0)
    return tuple(a)


def solve_from_hat(G: HatPoly, n: int) -> RootSet:
    c = [float(x) for x in G.coeffs]
    if not any(c):
        raise ValueError("fibre derivative vanishes identically (F is a function of H)")
    return solve_cubic(c) if n == 3 else solve_quartic(c)


# --- quartic sensitivities -------------------------------------------------------


def _g4(a):
    a0, a1, a2, a3 = a[:4]
    return HatPoly((-a1, 4 * a0 - 2 * a2, 3 * (a1 - a3), 2 * a2, a3))


def _dG_da(s):
    """Partial derivatives of G4_hat(s) in a0..a3."""
    return np.array([4 * s, 3 * s * s - 1, 2 * s**3 - 2 * s, s**4 - 3 * s * s])


def root_sensitivity(a: Sequence[float], s3: float) -> np.ndarray:
    """(d s3 / d a_i), i = 0..3, for a simple root s3 of G4_hat."""
    dG = _g4(a).deriv()(s3)
    if abs(dG) < 1e-12:
        raise ValueError(f"repeated root at s = {s3}: G4_hat'(s) = {dG}")
    return -_dG_da(s3) / dG


def invariant_matrix(roots: Sequence[complex]) -> np.ndarray:
    """M[i, j] = d r_i / d a_j = s_i^j / (1 + s_i^2)^2 (a4 held at 0)."""
    s = np.asarray(roots, dtype=complex)
    return s[:, None] ** np.arange(4)[None, :] / ((1 + s * s) ** 2)[:, None]


def jacobian_da_dr(a: Sequence[float], rs: RootSet) -> np.ndarray:
    """Inverse of :func:`invariant_matrix`; column i is d a / d r_i for ``rs.roots()[i]``."""
    roots = rs.roots()
    if len(roots) != 4:
        raise ValueError("need four roots")
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(roots[i] - roots[j]) < 1e-12:
                raise ValueError("root collision: invariant matrix is singular")
    M = invariant_matrix(roots)
    try:
        return np.linalg.inv(M)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"singular invariant matrix: {exc}") from exc


def gamma_hat(a: Sequence[float]) -> HatPoly:
    a0, a1, _, a3 = a[:4]
    return HatPoly((-(a1 + a3), 4 * a0, a1 + a3))


@dataclass(frozen=True)
class NonlinearityReport:
    s3: float
    S: float
    G_prime: float
    gamma: float
    dlam_dr: float
    oracle_dlam_dr: float
    im_r_pair: float
    im_r_zero: bool


def dlam_dr_closed_form(a: Sequence[float], s3: float, others: Sequence[complex]) -> tuple:
    """Return (S, G', gamma, d lambda_3 / d r_3) from the closed form times KAPPA."""
    S = complex(np.prod([s3 - s for s in others])).real
    Gp = _g4(a).deriv()(s3)
    gam = gamma_hat(a)(s3)
    value = KAPPA * (-(1 + s3 * s3) ** 2 * gam / (S * Gp))
    return S, Gp, gam, value


def dlam_dr_chain_rule(a: Sequence[float], rs: RootSet, index: int) -> float:
    """d(a3 s)/d r for root ``rs.roots()[index]`` via the numeric Jacobian."""
    s = rs.roots()[index].real
    da = jacobian_da_dr(a, rs)[:, index]
    ds = root_sensitivity(a, s)
    return float((s * da[3] + a[3] * np.dot(ds, da)).real)


def genuine_nonlinearity(a: Sequence[float], rs: RootSet | None = None) -> list[NonlinearityReport]:
    """One report per real root of G4_hat in an elliptic configuration."""
    a = [float(v) for v in a]
    if len(a) == 5 and a[4] == 0:
        a = a[:4]
    if len(a) != 4:
        raise ValueError("genuine_nonlinearity expects canonical coefficients (a4 = 0)")
    if not a[3] > 0:
        raise ValueError("a3 = g must be positive")
    if rs is None:
        rs = solve_quartic(_g4(a).coeffs)
    if classify_roots(rs) is not RootClass.ELLIPTIC:
        raise ValueError("configuration is not elliptic (need one complex pair and two real roots)")
    roots = rs.roots()
    F = HatPoly(tuple(a) + (0.0,))
    pair = roots[0]
    im_r = invariant_at(F, pair, 4).imag
    out = []
    for idx in (2, 3):
        s3 = roots[idx].real
        others = [z for j, z in enumerate(roots) if j != idx]
        S, Gp, gam, val = dlam_dr_closed_form(a, s3, others)
        if abs(S) < 1e-12 or abs(Gp) < 1e-12:
            raise ValueError("S or G4_hat' too small at s3")
        oracle = dlam_dr_chain_rule(a, rs, idx)
        out.append(NonlinearityReport(s3, S, Gp, gam, val, oracle, im_r, abs(im_r) <= IMAG_TOL))
    return out


def remainder_gamma(a: Sequence) -> tuple[HatPoly, HatPoly]:
    """gamma and the closed-form remainder of G4_hat divided by gamma.

    Works with floats or fractions.Fraction.
    """
    a0, a1, a2, a3 = a[:4]
    if a1 + a3 == 0:
        raise ValueError("a1 + a3 = 0: gamma may vanish identically (exceptional case)")
    bracket = a1**3 + a1**2 * a3 - a1 * (4 * a0 * a2 + a3**2) + a3 * (8 * a0**2 - 4 * a0 * a2 - a3**2)
    scale = 2 * bracket / (a1 + a3) ** 3
    R = HatPoly((scale * (a1 + a3), -4 * a0 * scale))
    return gamma_hat((a0, a1, a2, a3)), R


@dataclass(frozen=True)
class VieteParam:
    alpha: float
    beta: float
    mu: float
    ratios: tuple[float, float, float]  # a0/a3, a1/a3, a2/a3

    def coefficients(self, a3: float = 1.0) -> tuple[float, float, float, float]:
        r0, r1, r2 = self.ratios
        return (r0 * a3, r1 * a3, r2 * a3, a3)


def viete_parametrization(alpha: float, beta: float) -> VieteParam:
    """Quartic whose G4_hat has roots alpha +- i beta, mu, -1/mu and is divisible by gamma."""
    if alpha == 0:
        raise ValueError("alpha = 0 forces beta = 1, i.e. roots at +-i")
    if beta == 0:
        raise ValueError("beta must be nonzero")
    rho = alpha * alpha + beta * beta
    d = (rho - 1.0) / alpha  # mu - 1/mu
    root = math.sqrt(d * d + 4.0)
    mu = 0.5 * (d + root) if d >= 0 else 0.5 * (d - root)
    ratios = ((1.0 - rho * rho) / (4.0 * alpha), rho, (1.0 - 3.0 * alpha * alpha - beta * beta) / (2.0 * alpha))
    return VieteParam(alpha, beta, mu, ratios)


# --- elliptic second-order equation ---------------------------------------------


@dataclass(frozen=True)
class EllipticResidual:
    max_residual: float
    residual: np.ndarray
    discriminant: np.ndarray
    system_residual: float


def _d(f, h, axis, periodic):
    if periodic:
        return (np.roll(f, -1, axis) - np.roll(f, 1, axis)) / (2 * h)
    return np.gradient(f, h, axis=axis)


def _symbol_discriminant(a: float, b: float) -> float:
    a, b = Fraction(float(a)), Fraction(float(b))
    B = a / b
    return float(B * B - (1 / b) * ((a * a + b * b) / b))


def elliptic_pde_residual(u, v, alpha_t, beta_t, spacing, periodic: bool = True,
                          beta_min: float = 1e-8) -> EllipticResidual:
    """Residual of the elliptic equation satisfied by Im r for the complex pair.

    Arrays are indexed ``[i_t, i_x]``; ``spacing = (ht, hx)``. For non-periodic
    grids the two outermost layers are excluded from the maxima.
    """
    u, v, at, bt = (np.asarray(z, dtype=float) for z in (u, v, alpha_t, beta_t))
    if np.min(np.abs(bt)) < beta_min:
        raise ValueError(f"beta below threshold {beta_min}")
    ht, hx = spacing
    vt, vx = _d(v, ht, 0, periodic), _d(v, hx, 1, periodic)
    ut, ux = _d(u, ht, 0, periodic), _d(u, hx, 1, periodic)
    ratio = at / bt
    c_xx = (at * at + bt * bt) / bt
    res = (_d(vt / bt, ht, 0, periodic) + _d(ratio * vx, ht, 0, periodic)
           + _d(ratio * vt, hx, 1, periodic) + _d(c_xx * vx, hx, 1, periodic))
    sys1 = ut + at * ux - bt * vx
    sys2 = vt + bt * ux + at * vx
    # principal symbol: (1/b) d_tt + 2 (a/b) d_tx + ((a^2+b^2)/b) d_xx; its
    # discriminant is evaluated exactly on the node values to avoid cancellation
    disc = np.array([_symbol_discriminant(a, b) for a, b in zip(at.ravel(), bt.ravel())]).reshape(at.shape)
    sl = (slice(None), slice(None)) if periodic else (slice(2, -2), slice(2, -2))
    return EllipticResidual(
        float(np.max(np.abs(res[sl]))) if res[sl].size else 0.0,
        res,
        disc,
        float(max(np.max(np.abs(sys1[sl])), np.max(np.abs(sys2[sl])))) if res[sl].size else 0.0,
    )
