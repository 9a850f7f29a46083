"""Expression strings for analytic fields.

Fields are written in a small language: the coordinates ``q1, q2`` (conformal
model) or ``t, x`` (semi-geodesic model), the profile variable ``xi``, the
functions ``sin, cos, exp``, the constant ``pi``, numbers and ``+ - * / ^``.
Parsing and differentiation go through sympy; evaluation goes through
lambdified numpy/math callables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

U1, U2 = sp.symbols("u1 u2", real=True)
XI = sp.Symbol("xi", real=True)

_ALLOWED_FUNCS = {sp.sin, sp.cos, sp.exp}
_TRANSFORMS = standard_transformations + (convert_xor,)


class ExpressionError(ValueError):
    pass


def parse(text: str | float | int, variables: str = "field") -> sp.Expr:
    """Parse an expression string.

    ``variables="field"`` maps ``q1``/``t`` to the first torus coordinate and
    ``q2``/``x`` to the second; ``variables="profile"`` accepts only ``xi``.
    """
    if isinstance(text, (int, float)):
        return sp.Integer(int(text)) if float(text).is_integer() else sp.Float(float(text), 17)
    if variables == "field":
        names = {"q1": U1, "t": U1, "q2": U2, "x": U2}
    elif variables == "profile":
        names = {"xi": XI}
    else:
        raise ValueError(f"unknown variable set {variables!r}")
    local = dict(names)
    local.update({"sin": sp.sin, "cos": sp.cos, "exp": sp.exp, "pi": sp.pi})
    try:
        expr = parse_expr(str(text), local_dict=local, global_dict={"Integer": sp.Integer,
                          "Float": sp.Float, "Rational": sp.Rational, "Symbol": sp.Symbol},
                          transformations=_TRANSFORMS, evaluate=True)
    except Exception as exc:  # sympy raises a zoo of types here
        raise ExpressionError(f"cannot parse expression {text!r}: {exc}") from exc
    if not isinstance(expr, sp.Expr):
        raise ExpressionError(f"not a scalar expression: {text!r}")
    bad = expr.free_symbols - set(names.values())
    if bad:
        raise ExpressionError(f"unknown symbols {sorted(map(str, bad))} in {text!r}")
    for f in expr.atoms(sp.Function):
        if f.func not in _ALLOWED_FUNCS:
            raise ExpressionError(f"function {f.func} not allowed in {text!r}")
    return expr


def _lambdify(args, exprs):
    vec = sp.lambdify(args, exprs, modules="numpy", cse=True)
    sca = sp.lambdify(args, exprs, modules="math", cse=True)
    return vec, sca


def _broadcast(values, *args):
    shape = np.broadcast(*args).shape
    return tuple(np.broadcast_to(np.asarray(v, dtype=float), shape).copy() for v in values)


@dataclass(frozen=True)
class Profile:
    """A smooth one-variable function of ``xi`` with exact derivatives."""

    expr: sp.Expr
    _fns: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        d1 = sp.diff(self.expr, XI)
        d2 = sp.diff(d1, XI)
        object.__setattr__(self, "_fns", _lambdify((XI,), [self.expr, d1, d2]))

    @classmethod
    def from_string(cls, text: str | float) -> "Profile":
        return cls(parse(text, "profile"))

    def derivs(self, xi):
        """Return (f, f', f'') at ``xi`` (scalar or array)."""
        if np.ndim(xi) == 0:
            return tuple(float(v) for v in self._fns[1](float(xi)))
        return _broadcast(self._fns[0](xi), xi)

    def __call__(self, xi):
        return self.derivs(xi)[0]


def field_callables(expr: sp.Expr):
    """Lambdify value, gradient and full second-order jet of a field expression.

    Returns ``(jet_vec, jet_scalar, grad_scalar)``.
    """
    e1 = sp.diff(expr, U1)
    e2 = sp.diff(expr, U2)
    jet = [expr, e1, e2, sp.diff(e1, U1), sp.diff(e1, U2), sp.diff(e2, U2)]
    jet_vec, jet_sca = _lambdify((U1, U2), jet)
    grad_sca = sp.lambdify((U1, U2), jet[:3], modules="math", cse=True)
    return jet_vec, jet_sca, grad_sca


def is_constant(expr: sp.Expr) -> bool:
    return not expr.free_symbols


def as_float(expr: sp.Expr) -> float:
    return float(sp.N(expr, 17))

