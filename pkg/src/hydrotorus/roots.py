"""Closed-form quadratic, cubic and quartic root solving with Newton polish.

Real roots are computed in real arithmetic and complex roots come out as
conjugate pairs from real quadratic factors, so the solver never returns an
unpaired complex root.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Sequence

DEFAULT_TOL = 1e-7
# relative size below which the leading coefficient is treated as zero
_DROP = 1e-14


class RootClass(enum.Enum):
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC = "elliptic"
    DEGENERATE = "degenerate"

    @property
    def gray(self) -> int:
        return {"hyperbolic": 255, "elliptic": 128, "degenerate": 0}[self.value]


@dataclass(frozen=True)
class RootSet:
    """Roots of a real polynomial.

    ``complex_pairs`` holds ``(alpha, beta)`` with ``beta > 0`` for the pair
    ``alpha +- i beta``. ``repeated`` flags roots (in :meth:`roots` order) lying
    within ``DEFAULT_TOL`` of another root.
    """

    real_roots: tuple[float, ...]
    complex_pairs: tuple[tuple[float, float], ...]
    degree: int
    repeated: tuple[bool, ...] = ()
    condition: float = 1.0
    degree_drop: bool = False
    leading_ratio: float = 1.0

    def roots(self) -> list[complex]:
        """Pair members first (alpha + i beta, alpha - i beta), then real roots ascending."""
        out: list[complex] = []
        for a, b in self.complex_pairs:
            out += [complex(a, b), complex(a, -b)]
        out += [complex(r, 0.0) for r in self.real_roots]
        return out

    @property
    def count(self) -> int:
        return len(self.real_roots) + 2 * len(self.complex_pairs)


def _polyval(c: Sequence, s):
    acc = 0
    for ck in reversed(c):
        acc = acc * s + ck
    return acc


def _polyder(c: Sequence) -> list:
    return [k * c[k] for k in range(1, len(c))]


def _polish(c, dc, s, steps: int = 2, max_step: float = math.inf):
    """Newton steps, each kept only if it lowers the residual.

    ``max_step`` stops a step near a multiple root from leaping onto a
    neighbouring root.
    """
    f = _polyval(c, s)
    for _ in range(steps):
        d = _polyval(dc, s)
        if d == 0 or f == 0:
            break
        step = f / d
        if abs(step) > max_step:
            break
        s_new = s - step
        f_new = _polyval(c, s_new)
        if abs(f_new) < abs(f):
            s, f = s_new, f_new
        else:
            break
    return s


def _quadratic(b: float, c: float):
    """Roots of the monic s^2 + b s + c as ('r', x) / ('p', alpha, beta) records."""
    disc = b * b - 4.0 * c
    if disc >= 0:
        q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
        if q == 0:
            return [("r", 0.0), ("r", 0.0)]
        return [("r", q), ("r", c / q)]
    return [("p", -0.5 * b, 0.5 * math.sqrt(-disc))]


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _cubic_monic(b: float, c: float, d: float):
    """Records for s^3 + b s^2 + c s + d."""
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0 or p > 0:
        u = _cbrt(-q / 2.0 - math.copysign(math.sqrt(max(disc, 0.0)), q))
        t = u - p / (3.0 * u) if u != 0 else 0.0
        r = t + shift
        mono = [d, c, b, 1.0]
        r = _polish(mono, _polyder(mono), r, steps=3)
        # deflate: s^3 + b s^2 + c s + d = (s - r)(s^2 + e1 s + e0)
        e1 = b + r
        e0 = -d / r if abs(r) > 1.0 else c + e1 * r
        return [("r", r)] + _quadratic(e1, e0)
    if p == 0:
        return [("r", shift)] * 3
    m = 2.0 * math.sqrt(-p / 3.0)
    if p * m == 0.0:
        # subnormal p: q is below resolution, roots are shift and shift +- sqrt(-p)
        w = math.sqrt(-p)
        return [("r", shift + w), ("r", shift), ("r", shift - w)]
    arg = 3.0 * q / (p * m)
    theta = math.acos(max(-1.0, min(1.0, arg)))
    return [("r", m * math.cos((theta - 2.0 * math.pi * k) / 3.0) + shift) for k in range(3)]


def _quartic_monic(b: float, c: float, d: float, e: float):
    """Records for s^4 + b s^3 + c s^2 + d s + e (Ferrari)."""
    shift = -b / 4.0
    p = c - 3.0 * b * b / 8.0
    q = b**3 / 8.0 - b * c / 2.0 + d
    r = -3.0 * b**4 / 256.0 + b * b * c / 16.0 - b * d / 4.0 + e
    scale = max(1.0, abs(b), abs(c), abs(d), abs(e))
    recs = []
    if abs(q) <= 1e-15 * scale**1.5:
        # biquadratic in y^2
        for rec in _quadratic(p, r):
            if rec[0] == "r":
                z = rec[1]
                if z >= 0:
                    recs += [("r", math.sqrt(z)), ("r", -math.sqrt(z))]
                else:
                    recs.append(("p", 0.0, math.sqrt(-z)))
            else:
                w = cmath.sqrt(complex(rec[1], rec[2]))
                recs += [("p", w.real, abs(w.imag)), ("p", -w.real, abs(w.imag))]
    else:
        # resolvent 8m^3 - 4p m^2 - 8r m + (4pr - q^2) has a root above p/2
        res = _cubic_monic(-p / 2.0, -r, (4.0 * p * r - q * q) / 8.0)
        m = max(x[1] for x in res if x[0] == "r")
        mono = [(4.0 * p * r - q * q) / 8.0, -r, -p / 2.0, 1.0]
        m = _polish(mono, _polyder(mono), m, steps=3)
        w2 = 2.0 * m - p
        if w2 <= 0:
            w2 = abs(w2) or 1e-300
        w = math.sqrt(w2)
        # d = q/(2w) satisfies d^2 = m^2 - r; the second form avoids dividing by a tiny w
        dd = m * m - r
        if w2 < abs(dd) and dd > 0:
            d_ = math.copysign(math.sqrt(dd), q)
        else:
            d_ = q / (2.0 * w)
        recs = _quadratic(-w, m + d_) + _quadratic(w, m - d_)
    out = []
    for rec in recs:
        out.append((rec[0], rec[1] + shift) + rec[2:])
    return out


def _finish(coeffs: Sequence[float], recs, degree: int, degree_drop: bool) -> RootSet:
    c = [float(x) for x in coeffs[: degree + 1]]
    dc = _polyder(c)
    est = [complex(r[1], r[2] if r[0] == "p" else 0.0) for r in recs]
    est += [complex(r[1], -r[2]) for r in recs if r[0] == "p"]

    def cap(z):
        gaps = [abs(z - w) for w in est if w is not z]
        return 0.3 * min(gaps) if gaps else math.inf

    reals, pairs = [], []
    for rec, z0 in zip(recs, est):
        if rec[0] == "r":
            reals.append(float(_polish(c, dc, rec[1], steps=4, max_step=cap(z0))))
        else:
            z = _polish(c, dc, z0, steps=4, max_step=cap(z0))
            pairs.append((z.real, abs(z.imag)))
    reals.sort()
    pairs.sort()
    full = [complex(a, b) for a, b in pairs] + [complex(a, -b) for a, b in pairs] + reals
    rs = RootSet(tuple(reals), tuple(pairs), degree)
    all_roots = rs.roots()
    rep = tuple(
        any(abs(z - w) < DEFAULT_TOL for j, w in enumerate(all_roots) if j != i)
        for i, z in enumerate(all_roots)
    )
    cmax = max(abs(x) for x in coeffs)
    lead = abs(float(coeffs[len(coeffs) - 1])) / cmax
    return RootSet(tuple(reals), tuple(pairs), degree, rep, _condition(c, full),
                   degree_drop, lead)


def _condition(c, roots) -> float:
    """Worst root displacement per unit coefficient perturbation, relative to max|c|.

    Measured on the scale max(1, |z|) so that clustered roots near zero are
    reported as ill-conditioned.
    """
    dc = _polyder(c)
    cmax = max(abs(ck) for ck in c)
    worst = 1.0
    for z in roots:
        d = abs(_polyval(dc, z))
        scale = max(1.0, abs(z))
        size = cmax * sum(abs(z) ** k for k in range(len(c)))
        if d * scale == 0:
            return math.inf
        worst = max(worst, size / (d * scale))
    return worst


def _effective_degree(coeffs: Sequence[float]) -> int:
    cmax = max(abs(float(x)) for x in coeffs)
    if cmax == 0:
        raise ValueError("all-zero coefficients")
    deg = len(coeffs) - 1
    while deg > 0 and abs(float(coeffs[deg])) <= _DROP * cmax:
        deg -= 1
    return deg


def _solve(coeffs: Sequence[float], nominal: int) -> RootSet:
    coeffs = [float(x) for x in coeffs]
    if len(coeffs) != nominal + 1:
        raise ValueError(f"expected {nominal + 1} coefficients, got {len(coeffs)}")
    deg = _effective_degree(coeffs)
    drop = deg < nominal
    lead = coeffs[deg]
    mono = [x / lead for x in coeffs[: deg + 1]]
    if deg == 0:
        recs = []
    elif deg == 1:
        recs = [("r", -mono[0])]
    elif deg == 2:
        recs = _quadratic(mono[1], mono[0])
    elif deg == 3:
        recs = _cubic_monic(mono[2], mono[1], mono[0])
    else:
        recs = _quartic_monic(mono[3], mono[2], mono[1], mono[0])
    rs = _finish(coeffs[: deg + 1], recs, deg, drop)
    if drop:
        rs = RootSet(rs.real_roots, rs.complex_pairs, deg, rs.repeated, rs.condition, True,
                     abs(coeffs[nominal]) / max(abs(x) for x in coeffs))
    return rs


def solve_quadratic(c: Sequence[float]) -> RootSet:
    return _solve(c, 2)


def solve_cubic(c: Sequence[float]) -> RootSet:
    """Roots of c0 + c1 s + c2 s^2 + c3 s^3."""
    return _solve(c, 3)


def solve_quartic(c: Sequence[float]) -> RootSet:
    """Roots of c0 + c1 s + ... + c4 s^4."""
    return _solve(c, 4)


def solve(c: Sequence[float]) -> RootSet:
    n = len(c) - 1
    if n not in (2, 3, 4):
        raise ValueError(f"unsupported degree {n}")
    return _solve(c, n)


def classify_roots(rs: RootSet, tol: float = DEFAULT_TOL) -> RootClass:
    if tol <= 0:
        raise ValueError("tol must be positive")
    if rs.degree_drop or rs.leading_ratio < tol:
        return RootClass.DEGENERATE
    roots = rs.roots()
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < tol:
                return RootClass.DEGENERATE
    if any(b < tol for _, b in rs.complex_pairs):
        return RootClass.DEGENERATE
    npairs = len(rs.complex_pairs)
    if npairs == 0:
        return RootClass.HYPERBOLIC
    if npairs == 1:
        return RootClass.ELLIPTIC
    # two pairs cannot come from a fibre derivative with nonzero leading term
    return RootClass.DEGENERATE
