"""Riemannian metrics on the 2-torus in conformal and semi-geodesic form."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
import sympy as sp
from scipy import ndimage

from . import expr as ex


class TorusPoint(NamedTuple):
    u1: float
    u2: float

    def reduced(self, periods: tuple[float, float]) -> "TorusPoint":
        return TorusPoint(self.u1 % periods[0], self.u2 % periods[1])


class FieldJet(NamedTuple):
    """Value and partial derivatives up to second order."""

    value: float
    d1: float
    d2: float
    d11: float
    d12: float
    d22: float


JetFn = Callable[[object, object], tuple]


@dataclass(frozen=True)
class ScalarField2:
    """A smooth periodic scalar field on a rectangular torus.

    ``jet_fn(u1, u2)`` returns the six-tuple (value, d1, d2, d11, d12, d22) and
    must accept numpy arrays. ``scalar_jet_fn`` and ``grad_fn`` are optional
    fast paths for python floats. ``expr`` keeps the symbolic form when the
    field came from an expression.
    """

    jet_fn: JetFn
    periods: tuple[float, float] = (1.0, 1.0)
    expr: sp.Expr | None = None
    scalar_jet_fn: JetFn | None = field(default=None, repr=False, compare=False)
    grad_fn: JetFn | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.periods) != 2 or min(self.periods) <= 0:
            raise ValueError(f"periods must be two positive reals, got {self.periods}")

    def jet(self, u1, u2) -> FieldJet:
        if self.scalar_jet_fn is not None and np.ndim(u1) == 0 and np.ndim(u2) == 0:
            return FieldJet(*(float(v) for v in self.scalar_jet_fn(float(u1), float(u2))))
        vals = self.jet_fn(u1, u2)
        shape = np.broadcast(np.asarray(u1), np.asarray(u2)).shape
        return FieldJet(*(np.broadcast_to(np.asarray(v, dtype=float), shape) for v in vals))

    def grad(self, u1: float, u2: float) -> tuple[float, float, float]:
        if self.grad_fn is not None:
            v = self.grad_fn(u1, u2)
            return float(v[0]), float(v[1]), float(v[2])
        j = self.jet(u1, u2)
        return j.value, j.d1, j.d2

    def __call__(self, u1, u2):
        return self.jet(u1, u2).value

    @property
    def is_constant(self) -> bool:
        return self.expr is not None and ex.is_constant(self.expr)


def expr_field(text: str | float | sp.Expr, periods=(1.0, 1.0)) -> ScalarField2:
    """Field from an expression string over ``q1, q2`` or ``t, x``."""
    e = text if isinstance(text, sp.Expr) else ex.parse(text, "field")
    jet_vec, jet_sca, grad_sca = ex.field_callables(e)
    return ScalarField2(jet_vec, tuple(float(p) for p in periods), e, jet_sca, grad_sca)


def constant_field(c: float, periods=(1.0, 1.0)) -> ScalarField2:
    return expr_field(sp.Float(float(c), 17) if not float(c).is_integer() else sp.Integer(int(c)), periods)


@dataclass(frozen=True)
class ConformalMetric:
    """ds^2 = Lambda(q1, q2) (dq1^2 + dq2^2)."""

    lam: ScalarField2

    @property
    def periods(self):
        return self.lam.periods


@dataclass(frozen=True)
class SemiGeodesicMetric:
    """ds^2 = g(t, x)^2 dt^2 + dx^2."""

    g: ScalarField2

    @property
    def periods(self):
        return self.g.periods


Metric = ConformalMetric | SemiGeodesicMetric


def metric_field(metric: Metric) -> ScalarField2:
    return metric.lam if isinstance(metric, ConformalMetric) else metric.g


# --- Liouville metrics -------------------------------------------------------


@dataclass(frozen=True)
class LiouvilleSpec:
    """Lambda = f1(m1 q1 + n1 q2) + f2(m2 q1 + n2 q2) with orthogonal directions."""

    f1: ex.Profile
    f2: ex.Profile
    m1: float
    n1: float
    m2: float
    n2: float

    @classmethod
    def from_strings(cls, f1: str, f2: str, directions) -> "LiouvilleSpec":
        m1, n1, m2, n2 = (float(d) for d in directions)
        return cls(ex.Profile.from_string(f1), ex.Profile.from_string(f2), m1, n1, m2, n2)

    def swapped(self) -> "LiouvilleSpec":
        return LiouvilleSpec(self.f2, self.f1, self.m2, self.n2, self.m1, self.n1)

    def check_directions(self) -> None:
        # m1 m2 / (n1 n2) = -1, written so that axis-aligned directions are allowed
        scale = max(abs(self.m1), abs(self.n1)) * max(abs(self.m2), abs(self.n2))
        if scale == 0:
            raise ValueError("Liouville direction vectors must be nonzero")
        if abs(self.m1 * self.m2 + self.n1 * self.n2) > 1e-12 * scale:
            raise ValueError(
                "Liouville directions are not orthogonal: "
                f"m1*m2 + n1*n2 = {self.m1 * self.m2 + self.n1 * self.n2:g}"
            )

    def xi_exprs(self):
        xi1 = sp.nsimplify(self.m1) * ex.U1 + sp.nsimplify(self.n1) * ex.U2
        xi2 = sp.nsimplify(self.m2) * ex.U1 + sp.nsimplify(self.n2) * ex.U2
        return xi1, xi2

    def component_exprs(self):
        xi1, xi2 = self.xi_exprs()
        return self.f1.expr.subs(ex.XI, xi1), self.f2.expr.subs(ex.XI, xi2)

    def lambda_expr(self) -> sp.Expr:
        e1, e2 = self.component_exprs()
        return e1 + e2


def liouville_conformal_factor(spec: LiouvilleSpec, periods=(1.0, 1.0),
                               probe: int = 64) -> ConformalMetric:
    spec.check_directions()
    lam = expr_field(spec.lambda_expr(), periods)
    rep = metric_positivity_scan(lam, (probe, probe))
    if not rep.passed:
        raise ValueError(
            f"Liouville conformal factor is not positive: min {rep.minimum:g} at {tuple(rep.location)}"
        )
    return ConformalMetric(lam)


# --- tabulated fields --------------------------------------------------------

# periodic central-difference stencils, offsets -3..3
_D1 = np.array([-1 / 60, 3 / 20, -3 / 4, 0.0, 3 / 4, -3 / 20, 1 / 60])
_D2 = np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90])
_D1_4 = np.array([0.0, 1 / 12, -2 / 3, 0.0, 2 / 3, -1 / 12, 0.0])
_D2_4 = np.array([0.0, -1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12, 0.0])


def periodic_diff(values: np.ndarray, h: float, axis: int, order: int = 1,
                  accuracy: int = 6) -> np.ndarray:
    """Periodic central difference of a grid along ``axis``."""
    if accuracy == 6:
        stencil = _D1 if order == 1 else _D2
    elif accuracy == 4:
        stencil = _D1_4 if order == 1 else _D2_4
    else:
        raise ValueError("accuracy must be 4 or 6")
    out = np.zeros_like(values, dtype=float)
    for off, w in zip(range(-3, 4), stencil):
        if w:
            out += w * np.roll(values, -off, axis=axis)
    return out / h**order


def field_from_samples(values, periods=(1.0, 1.0), accuracy: int = 6) -> ScalarField2:
    """Field from a periodic grid of samples.

    ``values[i, j]`` is the field at ``(i * L1 / N1, j * L2 / N2)``. Partials are
    periodic central differences; off-node values of every partial use periodic
    cubic-spline interpolation.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 2 or min(v.shape) < 8:
        raise ValueError(f"grid too small: need at least 8x8 samples, got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("grid contains non-finite entries")
    L1, L2 = (float(p) for p in periods)
    h1, h2 = L1 / v.shape[0], L2 / v.shape[1]
    d1 = periodic_diff(v, h1, 0, 1, accuracy)
    d2 = periodic_diff(v, h2, 1, 1, accuracy)
    grids = [
        v, d1, d2,
        periodic_diff(v, h1, 0, 2, accuracy),
        periodic_diff(d1, h2, 1, 1, accuracy),
        periodic_diff(v, h2, 1, 2, accuracy),
    ]
    coeffs = [ndimage.spline_filter(gr, order=3, mode="grid-wrap") for gr in grids]

    def jet_fn(u1, u2):
        a1, a2 = np.broadcast_arrays(np.asarray(u1, dtype=float), np.asarray(u2, dtype=float))
        coords = np.stack([a1.ravel() / h1, a2.ravel() / h2])
        out = []
        for c in coeffs:
            vals = ndimage.map_coordinates(c, coords, order=3, mode="grid-wrap", prefilter=False)
            out.append(vals.reshape(a1.shape))
        return tuple(out)

    def scalar_jet(u1, u2):
        return tuple(float(a[0]) for a in jet_fn(np.array([u1]), np.array([u2])))

    return ScalarField2(jet_fn, (L1, L2), None, scalar_jet)


# --- positivity --------------------------------------------------------------


@dataclass(frozen=True)
class PositivityReport:
    minimum: float
    location: TorusPoint
    passed: bool


def metric_positivity_scan(metric: Metric | ScalarField2, resolution=(64, 64)) -> PositivityReport:
    f = metric if isinstance(metric, ScalarField2) else metric_field(metric)
    n1, n2 = resolution
    if n1 < 2 or n2 < 2:
        raise ValueError("resolution must be at least 2 per axis")
    u1 = np.arange(n1) * (f.periods[0] / n1)
    u2 = np.arange(n2) * (f.periods[1] / n2)
    U1g, U2g = np.meshgrid(u1, u2, indexing="ij")
    vals = np.asarray(f(U1g, U2g), dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(vals))[0]
        return PositivityReport(float("nan"), TorusPoint(u1[bad[0]], u2[bad[1]]), False)
    k = np.unravel_index(np.argmin(vals), vals.shape)
    m = float(vals[k])
    return PositivityReport(m, TorusPoint(float(u1[k[0]]), float(u2[k[1]])), m > 0)
