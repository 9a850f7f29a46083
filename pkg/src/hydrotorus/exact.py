"""Exact polynomial arithmetic over the rationals.

Used to pin down the algebraic identities behind the genuine-nonlinearity
formula, the remainder of the fibre polynomial modulo gamma, and real-root
counts. Everything is exact; there are no tolerances in this module.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RationalPoly:
    """Univariate polynomial with Fraction coefficients, lowest degree first."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [_q(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def x(cls) -> "RationalPoly":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    @property
    def lead(self) -> Fraction:
        return self.c[-1] if self.c else Fraction(0)

    def __eq__(self, other):
        if not isinstance(other, RationalPoly):
            other = RationalPoly([other])
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"RationalPoly({[str(x) for x in self.c]})"

    def __str__(self):
        if not self.c:
            return "0"
        terms = []
        for k in range(len(self.c) - 1, -1, -1):
            ck = self.c[k]
            if ck == 0:
                continue
            mono = "" if k == 0 else ("s" if k == 1 else f"s^{k}")
            coef = str(ck)
            if mono and ck == 1:
                coef = ""
            elif mono and ck == -1:
                coef = "-"
            elif mono:
                coef = f"({ck})*" if ck.denominator != 1 else f"{ck}*"
            terms.append(coef + mono)
        return " + ".join(terms).replace("+ -", "- ")

    def __add__(self, other):
        other = other if isinstance(other, RationalPoly) else RationalPoly([other])
        n = max(len(self.c), len(other.c))
        a = self.c + (Fraction(0),) * (n - len(self.c))
        b = other.c + (Fraction(0),) * (n - len(other.c))
        return RationalPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly(-x for x in self.c)

    def __sub__(self, other):
        return self + (-(other if isinstance(other, RationalPoly) else RationalPoly([other])))

    def __rsub__(self, other):
        return RationalPoly([other]) - self

    def __mul__(self, other):
        if not isinstance(other, RationalPoly):
            o = _q(other)
            return RationalPoly(x * o for x in self.c)
        if not self.c or not other.c:
            return RationalPoly()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    out[i + j] += x * y
        return RationalPoly(out)

    __rmul__ = __mul__

    def __call__(self, s):
        acc = Fraction(0) if isinstance(s, (int, Fraction)) else 0
        for ck in reversed(self.c):
            acc = acc * s + ck
        return acc

    def deriv(self) -> "RationalPoly":
        return RationalPoly(k * self.c[k] for k in range(1, len(self.c)))

    def monic(self) -> "RationalPoly":
        if not self.c:
            return self
        return self * (1 / self.lead)

    def __divmod__(self, other):
        return poly_divmod(self, other)

    def __mod__(self, other):
        return poly_divmod(self, other)[1]

    def __floordiv__(self, other):
        return poly_divmod(self, other)[0]


def poly_divmod(num: RationalPoly, den: RationalPoly) -> tuple[RationalPoly, RationalPoly]:
    """Exact long division: ``num = q * den + r`` with ``deg r < deg den``."""
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    r = list(num.c)
    dd = den.degree
    if num.degree < dd:
        return RationalPoly(), RationalPoly(r)
    q = [Fraction(0)] * (num.degree - dd + 1)
    inv = 1 / den.lead
    for k in range(num.degree - dd, -1, -1):
        coef = r[k + dd] * inv
        q[k] = coef
        if coef:
            for j, dj in enumerate(den.c):
                r[k + j] -= coef * dj
    return RationalPoly(q), RationalPoly(r[:dd])


def poly_gcd(a: RationalPoly, b: RationalPoly) -> RationalPoly:
    """Monic greatest common divisor (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_part(p: RationalPoly) -> RationalPoly:
    g = poly_gcd(p, p.deriv())
    return p // g if g.degree > 0 else p


def sturm_chain(p: RationalPoly) -> list[RationalPoly]:
    chain = [p, p.deriv()]
    while not chain[-1].is_zero():
        r = chain[-2] % chain[-1]
        if r.is_zero():
            break
        chain.append(-r)
    return [c for c in chain if not c.is_zero()]


def _sign_changes(values: Sequence[Fraction]) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _at_infinity(chain, positive: bool) -> list[Fraction]:
    out = []
    for c in chain:
        sign = c.lead if positive or c.degree % 2 == 0 else -c.lead
        out.append(sign)
    return out


def sturm_real_root_count(p: RationalPoly, interval: tuple | None = None) -> int:
    """Number of distinct real roots; with ``interval=(a, b)`` those in (a, b]."""
    p = p if isinstance(p, RationalPoly) else RationalPoly(p)
    if p.is_zero():
        raise ValueError("zero polynomial")
    if p.degree == 0:
        return 0
    chain = sturm_chain(squarefree_part(p))
    if interval is None:
        return _sign_changes(_at_infinity(chain, False)) - _sign_changes(_at_infinity(chain, True))
    a, b = (_q(v) for v in interval)
    if a >= b:
        raise ValueError("interval must satisfy a < b")
    return _sign_changes([c(a) for c in chain]) - _sign_changes([c(b) for c in chain])


# --- the polynomials of the quartic analysis -----------------------------------


def g4_hat(a0, a1, a2, a3) -> RationalPoly:
    """Fibre-derivative polynomial of a quartic with a4 = 0."""
    a0, a1, a2, a3 = (_q(v) for v in (a0, a1, a2, a3))
    return RationalPoly([-a1, 4 * a0 - 2 * a2, 3 * (a1 - a3), 2 * a2, a3])


def gamma_poly(a0, a1, a2, a3) -> RationalPoly:
    a0, a1, a3 = _q(a0), _q(a1), _q(a3)
    return RationalPoly([-(a1 + a3), 4 * a0, a1 + a3])


def q_poly(a0, a1, a2, a3) -> RationalPoly:
    """The quartic appearing in the chain-rule expansion of d(lambda_3)/d(r_3)."""
    a0, a1, a2, a3 = (_q(v) for v in (a0, a1, a2, a3))
    return RationalPoly([a1 + 3 * a3, -4 * (a0 + a2), 3 * (a1 - 3 * a3), 4 * a2, 2 * a3])


def remainder_closed_form(a0, a1, a2, a3) -> RationalPoly:
    a0, a1, a2, a3 = (_q(v) for v in (a0, a1, a2, a3))
    bracket = a1**3 + a1**2 * a3 - a1 * (4 * a0 * a2 + a3**2) + a3 * (8 * a0**2 - 4 * a0 * a2 - a3**2)
    scale = 2 * bracket / (a1 + a3) ** 3
    return RationalPoly([scale * (a1 + a3), -4 * a0 * scale])


def symmetric_quartic_minus(k) -> RationalPoly:
    """s^4 + 2k s^3 - 6 s^2 - 2k s - 1, the claimed form for a0 = 0, a1 + a3 = 0."""
    k = _q(k)
    return RationalPoly([-1, -2 * k, -6, 2 * k, 1])


def symmetric_quartic_plus(k) -> RationalPoly:
    """G_hat / a3 computed directly with a0 = 0, a1 = -a3, a2 = k a3."""
    return g4_hat(0, -1, k, 1)


# --- identity verification -----------------------------------------------------


@dataclass
class IdentityCheck:
    name: str
    trials: int
    status: str  # "verified", "falsified" or "finding"
    constants: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "status": self.status,
            "constants": {k: str(v) if isinstance(v, Fraction) else v for k, v in self.constants.items()},
            "witnesses": self.witnesses,
            "notes": self.notes,
        }


@dataclass
class IdentityReport:
    seed: int
    checks: list[IdentityCheck]

    @property
    def ok(self) -> bool:
        return all(c.status != "falsified" for c in self.checks)

    def check(self, name: str) -> IdentityCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"seed": self.seed, "ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def _random_rational(rng: random.Random, num: int = 12, den: int = 9) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_tuple(rng: random.Random, a0_zero: bool = False) -> tuple[Fraction, ...]:
    """Random (a0, a1, a2, a3) with a3 != 0 and a1 + a3 != 0."""
    while True:
        a = [_random_rational(rng) for _ in range(4)]
        if a0_zero:
            a[0] = Fraction(0)
        if a[3] != 0 and a[1] + a[3] != 0:
            return tuple(a)


def _fmt(a) -> list[str]:
    return [str(x) for x in a]


def check_remainder(tuples) -> IdentityCheck:
    bad = []
    for a in tuples:
        _, r = poly_divmod(g4_hat(*a), gamma_poly(*a))
        if r != remainder_closed_form(*a):
            bad.append({"a": _fmt(a), "remainder": str(r), "closed_form": str(remainder_closed_form(*a))})
    return IdentityCheck("remainder_R", len(tuples), "falsified" if bad else "verified",
                         witnesses=bad[:5])


def speed_identity_factor(a) -> Fraction | None:
    """The rational c with 2 G_hat - Q = c * gamma, or None if no such c exists."""
    lhs = 2 * g4_hat(*a) - q_poly(*a)
    gam = gamma_poly(*a)
    if gam.is_zero():
        return None
    c = lhs.lead / gam.lead if lhs.degree == gam.degree else None
    if c is None or lhs != gam * c:
        return None
    return c


def check_speed_identity_factor(tuples) -> IdentityCheck:
    found: set[Fraction] = set()
    bad = []
    for a in tuples:
        c = speed_identity_factor(a)
        if c is None:
            bad.append({"a": _fmt(a), "difference": str(2 * g4_hat(*a) - q_poly(*a))})
        else:
            found.add(c)
    status = "verified" if not bad and len(found) == 1 else "falsified"
    consts = {"c": next(iter(found))} if len(found) == 1 else {"c_values": sorted(str(c) for c in found)}
    return IdentityCheck("speed_identity_factor", len(tuples), status, consts, bad[:5],
                         notes="2*G4_hat - Q = c * gamma")


def check_unit_values(tuples) -> IdentityCheck:
    bad = []
    for a in tuples:
        G = g4_hat(*a)
        target = 2 * (a[1] - a[3])
        if G(Fraction(1)) != target or G(Fraction(-1)) != target:
            bad.append({"a": _fmt(a), "G(1)": str(G(Fraction(1))), "G(-1)": str(G(Fraction(-1)))})
    return IdentityCheck("unit_point_values", len(tuples), "falsified" if bad else "verified",
                         witnesses=bad[:5], notes="G4_hat(+-1) = 2(a1 - a3) when a0 = 0")


def check_symmetric_family(ks: Iterable[int] = range(-10, 11)) -> IdentityCheck:
    claimed, derived = {}, {}
    for k in ks:
        claimed[str(k)] = sturm_real_root_count(symmetric_quartic_minus(k))
        derived[str(k)] = sturm_real_root_count(symmetric_quartic_plus(k))
    short = [k for k, v in claimed.items() if v != 4]
    status = "verified" if not short else "finding"
    notes = ("s^4+2ks^3-6s^2-2ks-1 has 4 real roots for every k"
             if not short else
             f"s^4+2ks^3-6s^2-2ks-1 has fewer than 4 real roots for k in {short}; the polynomial "
             "obtained directly from a0=0, a1=-a3 (constant term +1) has "
             + ("4 real roots for every k" if all(v == 4 for v in derived.values())
                else f"counts {derived}"))
    return IdentityCheck("symmetric_family_roots", len(claimed), status,
                         {"claimed_counts": claimed, "derived_counts": derived},
                         [{"k": k, "real_roots": claimed[k]} for k in short], notes)


def verify_displayed_identities(trials: int = 100, seed: int = 0) -> IdentityReport:
    rng = random.Random(seed)
    tuples = [random_tuple(rng) for _ in range(trials)]
    zero_a0 = [random_tuple(rng, a0_zero=True) for _ in range(trials)]
    return IdentityReport(seed, [
        check_remainder(tuples),
        check_speed_identity_factor(tuples),
        check_unit_values(zero_a0),
        check_symmetric_family(),
    ])
