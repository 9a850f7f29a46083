"""Candidate polynomial integrals and their fibre polynomials.

An integral of degree ``n`` is stored by its coefficient fields. In the
semi-geodesic model ``F = sum_k a_k (p1/g)^(n-k) p2^k``; in the conformal model
``F = sum_k b_k p1^(n-k) p2^k``. Homogeneous polynomials in two momenta are
handled as coefficient vectors indexed by the power of ``p2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .metric import (
    ConformalMetric,
    Metric,
    ScalarField2,
    SemiGeodesicMetric,
    TorusPoint,
    constant_field,
    expr_field,
)

SEMIGEODESIC = "semigeodesic"
CONFORMAL = "conformal"


@dataclass(frozen=True)
class IntegralCoeffs:
    degree: int
    coeffs: tuple[ScalarField2, ...]
    model: str = SEMIGEODESIC
    normalized: bool = False

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be positive")
        if len(self.coeffs) != self.degree + 1:
            raise ValueError(f"degree {self.degree} needs {self.degree + 1} coefficient fields, "
                             f"got {len(self.coeffs)}")
        if self.model not in (SEMIGEODESIC, CONFORMAL):
            raise ValueError(f"unknown model {self.model!r}")

    @classmethod
    def from_strings(cls, coeffs: Sequence[str | float], model: str = SEMIGEODESIC,
                     periods=(1.0, 1.0), normalized: bool = False) -> "IntegralCoeffs":
        fields = tuple(expr_field(c, periods) for c in coeffs)
        return cls(len(fields) - 1, fields, model, normalized)

    @classmethod
    def constant(cls, values: Sequence[float], model: str = SEMIGEODESIC,
                 periods=(1.0, 1.0)) -> "IntegralCoeffs":
        return cls(len(values) - 1, tuple(constant_field(v, periods) for v in values), model)

    def values_at(self, u1, u2) -> np.ndarray:
        """Coefficient values; shape ``(n+1,) + broadcast(u1, u2).shape``."""
        return np.array([c(u1, u2) for c in self.coeffs], dtype=float)

    def check_normalization(self, metric: SemiGeodesicMetric, points, tol: float = 1e-12) -> bool:
        n = self.degree
        for u1, u2 in points:
            a = self.values_at(u1, u2)
            if abs(a[n] - 1.0) > tol or abs(a[n - 1] - metric.g(u1, u2)) > tol:
                return False
        return True

    def evaluate(self, metric: Metric, point: TorusPoint, momentum) -> float:
        """Value of F at a phase-space point."""
        p1, p2 = momentum
        a = self.values_at(*point)
        if self.model == SEMIGEODESIC:
            if not isinstance(metric, SemiGeodesicMetric):
                raise TypeError("semi-geodesic integral needs a SemiGeodesicMetric")
            X = p1 / metric.g(*point)
        else:
            X = p1
        n = self.degree
        return float(sum(a[k] * X ** (n - k) * p2**k for k in range(n + 1)))


def hamiltonian_eval(metric: Metric, point: TorusPoint, momentum) -> float:
    p1, p2 = momentum
    if isinstance(metric, SemiGeodesicMetric):
        g = metric.g(*point)
        if not g > 0:
            raise ValueError(f"metric not positive at {tuple(point)}: g = {g}")
        return 0.5 * (p1 * p1 / (g * g) + p2 * p2)
    lam = metric.lam(*point)
    if not lam > 0:
        raise ValueError(f"metric not positive at {tuple(point)}: Lambda = {lam}")
    return (p1 * p1 + p2 * p2) / (2.0 * lam)


def bracket_residual(F: IntegralCoeffs, metric: Metric, point) -> np.ndarray:
    """Coefficients of {F, H} at a point, indexed by the power of p2.

    The basis is ``X^(n+1-k) p2^k`` with ``X = p1/g`` in the semi-geodesic model
    and ``X = p1`` in the conformal model. All entries vanish iff F is a first
    integral at the point.
    """
    n = F.degree
    u1, u2 = point
    jets = [c.jet(u1, u2) for c in F.coeffs]
    a = np.array([j.value for j in jets])
    a1 = np.array([j.d1 for j in jets])
    a2 = np.array([j.d2 for j in jets])
    out = np.zeros(n + 2)
    k = np.arange(n + 1)
    if F.model == SEMIGEODESIC:
        if not isinstance(metric, SemiGeodesicMetric):
            raise TypeError("semi-geodesic integral needs a SemiGeodesicMetric")
        gj = metric.g.jet(u1, u2)
        g, g_x = gj.value, gj.d2
        # {F,H} = (X/g) F_t|_X + p2 F_x|_X + (g_x/g) X (X F_p2 - p2 F_X)
        out[: n + 1] += a1 / g
        out[1:] += a2
        out[: n] += (g_x / g) * k[1:] * a[1:]
        out[1:] -= (g_x / g) * (n - k) * a
    else:
        if not isinstance(metric, ConformalMetric):
            raise TypeError("conformal integral needs a ConformalMetric")
        lj = metric.lam.jet(u1, u2)
        lam, l1, l2 = lj.value, lj.d1, lj.d2
        # {F,H} = (p1 F_q1 + p2 F_q2)/Lam + (p1^2+p2^2)(Lam_1 F_p1 + Lam_2 F_p2)/(2 Lam^2)
        out[: n + 1] += a1 / lam
        out[1:] += a2 / lam
        w = np.zeros(n)
        w += l1 * (n - k[:n]) * a[:n]
        w += l2 * k[1:] * a[1:]
        w /= 2.0 * lam * lam
        out[:n] += w
        out[2:] += w
    return out


# --- fibre polynomials --------------------------------------------------------


@dataclass(frozen=True)
class HatPoly:
    """Univariate polynomial in s, coefficients lowest degree first.

    Coefficients may be floats, complex numbers or ``fractions.Fraction``.
    """

    coeffs: tuple
    degree_drop: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def degree(self) -> int:
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i] != 0:
                return i
        return -1

    def is_zero(self) -> bool:
        return self.degree < 0

    def __call__(self, s):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def deriv(self) -> "HatPoly":
        return HatPoly(tuple(k * c for k, c in enumerate(self.coeffs))[1:] or (0,))

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])


def hat_polys(a: Sequence, n: int) -> tuple[HatPoly, HatPoly]:
    """Return (F_hat, G_hat) for coefficient values ``a = (a_0, ..., a_n)``.

    ``F_hat(s) = sum a_k s^k`` and ``G_hat = n s F_hat - (1 + s^2) F_hat'``, so
    that ``d/ds [F_hat / (1+s^2)^(n/2)] = -G_hat / (1+s^2)^(n/2+1)``.
    """
    if n not in (3, 4):
        raise ValueError(f"unsupported degree {n}; only 3 and 4 are handled")
    a = tuple(a)
    if len(a) != n + 1:
        raise ValueError(f"need {n + 1} coefficients, got {len(a)}")

    def at(i):
        return a[i] if 0 <= i <= n else 0

    # coefficient of s^k: (n-k+1) a_{k-1} - (k+1) a_{k+1}; the s^(n+1) term cancels
    g = tuple((n - k + 1) * at(k - 1) - (k + 1) * at(k + 1) for k in range(n + 1))
    fh = HatPoly(a, degree_drop=a[n] == 0)
    return fh, HatPoly(g, degree_drop=g[n] == 0)


def canonicalize_quartic(a: Sequence) -> tuple[tuple, object]:
    """Subtract ``a_4 * 4H^2`` so that the p2^4 coefficient vanishes."""
    if len(a) != 5:
        raise ValueError("canonicalize_quartic needs five coefficients")
    a0, a1, a2, a3, a4 = a
    return (a0 - a4, a1, a2 - 2 * a4, a3, a4 - a4), a4


def check_not_divisible_by_H(G: HatPoly) -> float:
    """|G(i)|; values near zero mean the fibre derivative is divisible by H."""
    if G.is_zero():
        raise ValueError("zero polynomial")
    return abs(G(1j))


# --- conformal model, complex momenta ------------------------------------------


def complex_momentum_coefficients(b: Sequence[float]) -> np.ndarray:
    """Complex coefficients A_j with ``F = sum_j A_j p^(n-j) pbar^j``, ``p = p1 - i p2``.

    ``b`` are the conformal-model coefficients at one point.
    """
    n = len(b) - 1
    p1 = np.array([0.5, 0.5], dtype=complex)  # (p + pbar)/2, indexed by power of pbar
    p2 = np.array([0.5j, -0.5j])  # i (p - pbar)/2
    out = np.zeros(n + 1, dtype=complex)
    for k, bk in enumerate(b):
        term = np.array([1.0 + 0j])
        for _ in range(n - k):
            term = np.convolve(term, p1)
        for _ in range(k):
            term = np.convolve(term, p2)
        out += bk * term
    return out


@dataclass(frozen=True)
class ExtremeCoefficientReport:
    A0: np.ndarray
    An: np.ndarray
    spread: float
    constant: bool


def extreme_coefficient_check(F: IntegralCoeffs, points, tol: float = 1e-8) -> ExtremeCoefficientReport:
    if F.model != CONFORMAL:
        raise ValueError("complex-momentum coefficients are defined for the conformal model")
    A0, An = [], []
    for u1, u2 in points:
        A = complex_momentum_coefficients(F.values_at(u1, u2))
        A0.append(A[0])
        An.append(A[-1])
    A0, An = np.array(A0), np.array(An)
    spread = max(float(np.max(np.abs(A0 - A0[0]))), float(np.max(np.abs(An - An[0]))))
    return ExtremeCoefficientReport(A0, An, spread, spread <= tol)
