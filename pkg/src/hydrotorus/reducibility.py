"""Explicit reducible integrals: simple waves, cubic and quartic identities.

All identities are checked coefficientwise in the momenta at each base point,
never by sampling momentum vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from . import expr as ex
from .hydro import build_matrix_A
from .integral import CONFORMAL, SEMIGEODESIC, IntegralCoeffs, bracket_residual
from .metric import (
    ConformalMetric,
    LiouvilleSpec,
    Metric,
    ScalarField2,
    SemiGeodesicMetric,
    expr_field,
)


class FlatCaseError(ValueError):
    pass


# --- homogeneous polynomials in (X, p2), indexed by the power of p2 ------------


def hmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)


def h_energy(model: str, lam: float = 1.0) -> np.ndarray:
    """2H in the model's momentum basis: X^2 + p2^2 (semi-geodesic, X = p1/g) or
    (p1^2 + p2^2)/Lambda (conformal)."""
    if model == SEMIGEODESIC:
        return np.array([1.0, 0.0, 1.0])
    return np.array([1.0, 0.0, 1.0]) / lam


# --- simple waves of the cubic system ---------------------------------------------


@dataclass(frozen=True)
class SimpleWaveSolution:
    """Travelling-wave coefficients a_i(xi), xi = x - lam t, of a cubic integral.

    ``a2`` doubles as the metric coefficient g(t, x) = a2(x - lam t).
    """

    lam: float
    a2: ex.Profile
    c1: float
    c2: float
    c3: float
    a1: ex.Profile = field(repr=False)
    a0: ex.Profile = field(repr=False)

    @property
    def k1(self) -> float:
        return self.c2

    @property
    def k2(self) -> float:
        return (3.0 - self.lam) / (2.0 * self.lam)

    def profiles(self, xi):
        """(a0, a1, a2) and their xi-derivatives at ``xi``."""
        return [p.derivs(xi) for p in (self.a0, self.a1, self.a2)]

    def _field(self, prof: ex.Profile, periods) -> ScalarField2:
        lam = sp.nsimplify(self.lam)
        return expr_field(prof.expr.subs(ex.XI, ex.U2 - lam * ex.U1), periods)

    def metric(self, periods=(1.0, 1.0)) -> SemiGeodesicMetric:
        return SemiGeodesicMetric(self._field(self.a2, periods))

    def integral(self, periods=(1.0, 1.0)) -> IntegralCoeffs:
        fields = (self._field(self.a0, periods), self._field(self.a1, periods),
                  self._field(self.a2, periods), expr_field(1, periods))
        return IntegralCoeffs(3, fields, SEMIGEODESIC, normalized=True)

    def linear_integral(self, periods=(1.0, 1.0)) -> IntegralCoeffs:
        """F1 = p1 + lam p2, written as g X + lam p2 with X = p1/g."""
        return IntegralCoeffs(1, (self._field(self.a2, periods), expr_field(sp.nsimplify(self.lam), periods)),
                              SEMIGEODESIC)


def simple_wave_constants(lam: float) -> tuple[float, float, float]:
    """(c1, c2, c3) for which the cubic system admits a non-flat simple wave."""
    c1 = 3.0 * (lam - 1.0) / (2.0 * lam**2)
    c2 = (lam - 1.0) / (2.0 * lam**3)
    return c1, c2, 0.0


def simple_wave(lam: float, a2: ex.Profile | str) -> SimpleWaveSolution:
    if lam == 0:
        raise FlatCaseError("flat case; no simple wave needed (lambda = 0 gives g = g(x))")
    prof = a2 if isinstance(a2, ex.Profile) else ex.Profile.from_string(a2)
    xi = np.linspace(0.0, 1.0, 257)
    if np.min(prof(xi)) <= 0:
        raise ValueError("a2 profile must be positive")
    c1, c2, c3 = simple_wave_constants(lam)
    y = prof.expr
    L = sp.nsimplify(lam)
    C1 = 3 * (L - 1) / (2 * L**2)
    C2 = (L - 1) / (2 * L**3)
    a1 = ex.Profile((3 - L) / 2 + C1 * y**2)
    a0 = ex.Profile(y * (1 - L * C1) + C2 * y**3)
    return SimpleWaveSolution(float(lam), prof, c1, c2, c3, a1, a0)


def simple_wave_residuals(sol: SimpleWaveSolution, xi, h: float = 1e-5) -> dict:
    """Residuals of the travelling-wave ODEs with U' from central differences."""
    xi = np.asarray(xi, dtype=float)
    U = np.array([p(xi) for p in (sol.a0, sol.a1, sol.a2)])
    Up = (np.array([p(xi + h) for p in (sol.a0, sol.a1, sol.a2)])
          - np.array([p(xi - h) for p in (sol.a0, sol.a1, sol.a2)])) / (2 * h)
    a0, a1, a2 = U
    d0, d1, d2 = Up
    lam = sol.lam
    ode = np.array([
        a1 * d2 - lam * d0,
        a2 * d0 + 2 * a2 * d2 - 3 * a0 * d2 - lam * d1,
        a2 * d1 + (3 - 2 * a1) * d2 - lam * d2,
    ])
    eig = []
    for j in range(xi.size):
        A = build_matrix_A((a0[j], a1[j], a2[j], 1.0), 3)
        eig.append(np.linalg.norm(A @ Up[:, j] - lam * Up[:, j]))
    c1 = sol.c1
    elim = lam * a0 - (c1 / 3.0) * a2**3 - ((3 - lam) / 2.0) * a2 - sol.c3
    return {
        "ode": float(np.max(np.abs(ode))),
        "eigenvector": float(np.max(eig)),
        "elimination": float(np.max(np.abs(elim))),
    }


# --- reduction certificates ---------------------------------------------------------


@dataclass
class ReductionCertificate:
    degree: int
    constants: dict
    sub_integral: str
    residual: float
    tolerance: float
    grid: tuple[int, ...] = ()

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "constants": {k: float(v) for k, v in self.constants.items()},
            "sub_integral": self.sub_integral,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "grid": list(self.grid),
        }


def cubic_identity_residual(a: np.ndarray, g: float, lam: float, k1: float, k2: float) -> float:
    """max |F3 - (k1 F1^3 + 2 k2 H F1)| over coefficients in the basis X^(3-k) p2^k."""
    F1 = np.array([g, lam])
    rhs = k1 * hmul(hmul(F1, F1), F1) + k2 * hmul(h_energy(SEMIGEODESIC), F1)
    return float(np.max(np.abs(np.asarray(a, dtype=float) - rhs)))


def verify_cubic_identity(sol: SimpleWaveSolution, nodes: int = 256, k1: float | None = None,
                          k2: float | None = None, tol: float = 1e-12) -> ReductionCertificate:
    k1 = sol.k1 if k1 is None else k1
    k2 = sol.k2 if k2 is None else k2
    xi = np.arange(nodes) / nodes
    a0, a1, a2 = (p(xi) for p in (sol.a0, sol.a1, sol.a2))
    worst = 0.0
    for j in range(nodes):
        worst = max(worst, cubic_identity_residual((a0[j], a1[j], a2[j], 1.0), a2[j], sol.lam, k1, k2))
    return ReductionCertificate(3, {"k1": k1, "k2": k2, "lambda": sol.lam},
                                f"F1 = p1 + {sol.lam:g} p2", worst, tol, (nodes,))


def _grid_points(periods, grid):
    n1, n2 = grid
    return [(i * periods[0] / n1, j * periods[1] / n2) for i in range(n1) for j in range(n2)]


def _model_scale(F: IntegralCoeffs, metric: Metric, u1, u2) -> float:
    if F.model == CONFORMAL:
        return float(metric.lam(u1, u2))
    return 1.0


def verify_quartic_identity(F4: IntegralCoeffs, F2: IntegralCoeffs, metric: Metric,
                            grid=(16, 16), tol: float = 1e-10,
                            bracket_tol: float = 1e-8) -> ReductionCertificate:
    """Fit F4 = k1 F2^2 + 2 k2 H F2 + 4 k3 H^2 by least squares over the grid."""
    if F4.degree != 4 or F2.degree != 2 or F4.model != F2.model:
        raise ValueError("need a quartic and a quadratic integral in the same model")
    pts = _grid_points(metric.periods, grid)
    worst_bracket = max(float(np.max(np.abs(bracket_residual(F2, metric, p)))) for p in pts)
    if worst_bracket > bracket_tol:
        raise ValueError(f"F2 is not an integral: bracket residual {worst_bracket:.3g}")
    rows, rhs = [], []
    for u1, u2 in pts:
        lam = _model_scale(F4, metric, u1, u2)
        b = F2.values_at(u1, u2)
        E = h_energy(F4.model, lam)
        basis = np.stack([hmul(b, b), hmul(E, b), hmul(E, E)], axis=1)
        rows.append(basis)
        rhs.append(F4.values_at(u1, u2))
    A = np.vstack(rows)
    y = np.concatenate(rhs)
    normal = A.T @ A
    if np.linalg.cond(normal) > 1e12:
        raise np.linalg.LinAlgError("F2^2, H F2 and H^2 are linearly dependent on this grid")
    k, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = float(np.max(np.abs(A @ k - y)))
    return ReductionCertificate(4, {"k1": k[0], "k2": k[1], "k3": k[2]}, "F2 (supplied)",
                                resid, tol, tuple(grid))


# --- factorisation on the elliptic region ------------------------------------------


@dataclass(frozen=True)
class QuarticFactorization:
    K: np.ndarray  # hat coefficients, lowest first
    M: np.ndarray
    residual: float
    proportional_to_H: bool

    @property
    def ok(self) -> bool:
        return self.residual <= 1e-8


def factor_quartic_elliptic(a, r: float, alpha: float, beta: float, g: float = 1.0,
                            tol: float = 1e-8) -> QuarticFactorization:
    """Divide F4 - 4 r H^2 by K = (p2 - X(alpha+i beta))(p2 - X(alpha-i beta)).

    Works with hat polynomials in s = p2 / X (X = p1/g); ``g`` only fixes the
    momentum basis and does not enter the hat coefficients.
    """
    a = np.asarray(a, dtype=float)
    if a.size != 5:
        raise ValueError("need five quartic coefficients")
    target = a - r * np.array([1.0, 0.0, 2.0, 0.0, 1.0])
    K = np.array([alpha * alpha + beta * beta, -2.0 * alpha, 1.0])
    prop_H = abs(alpha) < tol and abs(beta - 1.0) < tol
    # numpy polydiv wants highest degree first
    q, rem = np.polydiv(target[::-1], K[::-1])
    M = np.zeros(3)
    M[: q.size] = q[::-1]
    res = float(np.max(np.abs(rem))) if rem.size else 0.0
    out = QuarticFactorization(K, M, res, prop_H)
    if res > tol:
        raise ValueError(f"F4 - 4rH^2 is not divisible by K: remainder {res:.3g}")
    return out


# --- conformal model residuals ------------------------------------------------------


@dataclass(frozen=True)
class ConformalResiduals:
    linear: float | None = None
    direction: tuple[float, float] | None = None
    first_order: float | None = None
    second_order: float | None = None


def conformal_residuals(lam: ScalarField2, grid=(32, 32), linear=None, quadratic=None,
                        b1: ScalarField2 | None = None) -> ConformalResiduals:
    """Residuals of the transport/Laplace-type equations for Lambda.

    ``linear = (b0, b1)`` checks ``b0 (1/Lam)_q1 + b1 (1/Lam)_q2 = 0``;
    ``quadratic = (A, B)`` checks ``B Lam_11 - 2A Lam_12 - B Lam_22 = 0`` and,
    when the real coefficient field ``b1`` is given, the first-order pair.
    """
    n1, n2 = grid
    q1, q2 = np.meshgrid(np.arange(n1) * lam.periods[0] / n1,
                         np.arange(n2) * lam.periods[1] / n2, indexing="ij")
    J = lam.jet(q1, q2)
    out = {}
    if linear is not None:
        c0, c1 = linear
        res = -(c0 * J.d1 + c1 * J.d2) / J.value**2
        out["linear"] = float(np.max(np.abs(res)))
        out["direction"] = (float(c1), float(-c0))
    if quadratic is not None:
        A, B = quadratic
        out["second_order"] = float(np.max(np.abs(B * J.d11 - 2 * A * J.d12 - B * J.d22)))
        if b1 is not None:
            bj = b1.jet(q1, q2)
            r1 = bj.d1 * J.value + bj.value * J.d1 + 2 * A * J.d1 + 2 * B * J.d2
            r2 = bj.d2 * J.value + bj.value * J.d2 + 2 * B * J.d1 - 2 * A * J.d2
            out["first_order"] = float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))
    return ConformalResiduals(**out)


# --- the classical quadratic integral of a Liouville metric ---------------------------


def liouville_quadratic_integral(spec: LiouvilleSpec, periods=(1.0, 1.0)) -> IntegralCoeffs:
    """(f2 P1^2 - f1 P2^2) / Lambda with P_i the momenta along the two directions."""
    spec.check_directions()
    f1, f2 = spec.component_exprs()
    lam = f1 + f2
    m1, n1, m2, n2 = (sp.nsimplify(v) for v in (spec.m1, spec.n1, spec.m2, spec.n2))
    w1 = m1**2 + n1**2
    w2 = m2**2 + n2**2
    # (e.p)^2 = m^2 p1^2 + 2 m n p1 p2 + n^2 p2^2
    b0 = (f2 * m1**2 / w1 - f1 * m2**2 / w2) / lam
    b1 = (f2 * 2 * m1 * n1 / w1 - f1 * 2 * m2 * n2 / w2) / lam
    b2 = (f2 * n1**2 / w1 - f1 * n2**2 / w2) / lam
    fields = tuple(expr_field(sp.simplify(b), periods) for b in (b0, b1, b2))
    return IntegralCoeffs(2, fields, CONFORMAL)


def liouville_complex_coefficients(spec: LiouvilleSpec, periods=(1.0, 1.0)):
    """(A, B, b1-field) with F2 = (A+iB) p^2 + b1 p pbar + (A-iB) pbar^2 for the classical integral."""
    from .integral import complex_momentum_coefficients

    F2 = liouville_quadratic_integral(spec, periods)
    A0 = complex_momentum_coefficients(F2.values_at(0.0, 0.0))[0]
    b0, b1, b2 = (c.expr for c in F2.coeffs)
    # p1^2 -> (p^2 + 2 p pbar + pbar^2)/4, p1 p2 -> i(p^2 - pbar^2)/4, p2^2 -> -(p^2 - 2 p pbar + pbar^2)/4
    mid = sp.simplify((b0 + b2) / 2)
    return float(A0.real), float(A0.imag), expr_field(mid, periods)


def conformal_metric_of(spec: LiouvilleSpec, periods=(1.0, 1.0)) -> ConformalMetric:
    from .metric import liouville_conformal_factor

    return liouville_conformal_factor(spec, periods)
