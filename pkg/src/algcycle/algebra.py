"""Exact bivariate polynomials with coefficients in Q(a)[s]/(s^2 - sigma(a)).

Coefficients are rational functions of a single parameter, optionally
extended by one square root ``s`` with ``s**2 == sigma``.  Rational
functions are delegated to sympy's fraction-field elements, which are kept
in lowest terms, so zero-testing is structural.

Text format (round-trip stable): terms ``c*x^i*y^j`` joined by ``+``/``-``,
rational coefficients written ``p/q``, parameter-dependent or radical ones
in parentheses::

    2 + 4*x + (-4*a)*x^2 + 12*x*y
    (1 + (2)*s)*x^2*y - 3/2*y^2

Any sympy-readable expression in the variables, the parameter and ``s`` is
accepted on input.
"""

from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Callable, Dict, Iterable, Mapping, Tuple

import sympy as sp
from sympy import QQ
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from .errors import ContextError, DomainError

__all__ = [
    "Rational",
    "ScalarContext",
    "ParamScalar",
    "BiPoly",
    "param_field",
    "poly_arithmetic",
    "poly_partial",
    "poly_eval",
    "to_fraction",
]

Rational = Fraction
RADICAL = "s"

Monomial = Tuple[int, int]


@functools.lru_cache(maxsize=None)
def param_field(name: str = "a"):
    """The field Q(name) as a sympy domain (cached, so contexts compare equal)."""
    return QQ.frac_field(sp.Symbol(name))


def to_fraction(value) -> Fraction:
    """Convert an int, Fraction, sympy Rational, gmpy mpq or decimal string to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction or a string")
    num = getattr(value, "numerator", None)
    den = getattr(value, "denominator", None)
    if num is not None and den is not None:
        num = num() if callable(num) else num
        den = den() if callable(den) else den
        return Fraction(int(num), int(den))
    if isinstance(value, sp.Rational):
        return Fraction(int(value.p), int(value.q))
    raise TypeError(f"cannot convert {value!r} to Fraction")


def _frac_is_constant(e) -> bool:
    return e.numer.is_ground and e.denom.is_ground


def _frac_constant(e) -> Fraction:
    return to_fraction(e.numer.LC) / to_fraction(e.denom.LC)


def _poly_float(p, a: float) -> float:
    return math.fsum(float(c) * a ** m[0] for m, c in p.terms())


def _frac_float(e, a: float) -> float:
    if _frac_is_constant(e):
        return float(_frac_constant(e))
    den = _poly_float(e.denom, a)
    if den == 0.0:
        raise DomainError(f"coefficient {e.as_expr()} has a pole at parameter {a}")
    return _poly_float(e.numer, a) / den


def _frac_str(e) -> str:
    return str(e.as_expr()).replace("**", "^")


@dataclass(frozen=True)
class ScalarContext:
    """Arithmetic context: parameter name and the radicand sigma of ``s``."""

    param: str = "a"
    sigma: object = None  # element of param_field(param); None means sigma = 1

    def __post_init__(self):
        field = param_field(self.param)
        sig = field.one if self.sigma is None else self.sigma
        if not isinstance(sig, type(field.one)):
            sig = _coerce(field, sig)
        object.__setattr__(self, "sigma", sig)

    @property
    def field(self):
        return param_field(self.param)

    @property
    def extended(self) -> bool:
        return self.sigma != self.field.one

    def convert(self, value):
        return _coerce(self.field, value)

    def sigma_value(self, a: float | None) -> float:
        if _frac_is_constant(self.sigma):
            return float(_frac_constant(self.sigma))
        if a is None:
            raise DomainError("parameter value required to evaluate the radicand")
        return _frac_float(self.sigma, a)

    def at(self, a0) -> "ScalarContext":
        """Context with the parameter fixed to the exact rational ``a0``."""
        return ScalarContext(self.param, _frac_subs(self.field, self.sigma, a0))


def _coerce(field, value):
    if isinstance(value, type(field.one)):
        return value
    if isinstance(value, (int, Fraction, _RationalABC)) and not isinstance(value, bool):
        f = to_fraction(value)
        return field.convert(QQ(f.numerator, f.denominator))
    if isinstance(value, sp.Basic):
        return field.from_sympy(value)
    raise TypeError(f"cannot coerce {value!r} into {field}")


def _frac_subs(field, e, a0):
    f = to_fraction(a0)
    gen = field.field.gens[0]
    return e.subs(gen, QQ(f.numerator, f.denominator))


class ParamScalar:
    """Element r0(a) + r1(a)*s of Q(a)[s]/(s^2 - sigma(a))."""

    __slots__ = ("r0", "r1", "ctx")

    def __init__(self, r0, r1=0, ctx: ScalarContext | None = None):
        ctx = ctx or ScalarContext()
        self.ctx = ctx
        self.r0 = ctx.convert(r0)
        self.r1 = ctx.convert(r1)
        if self.r1 and not ctx.extended:
            # s = 1 when there is no radical: fold it into the rational part
            self.r0 = self.r0 + self.r1
            self.r1 = ctx.field.zero

    def _check(self, other: "ParamScalar"):
        if self.ctx != other.ctx:
            raise ContextError(f"mismatched scalar contexts {self.ctx} and {other.ctx}")

    def _lift(self, other) -> "ParamScalar":
        if isinstance(other, ParamScalar):
            self._check(other)
            return other
        return ParamScalar(other, 0, self.ctx)

    def __add__(self, other):
        o = self._lift(other)
        return ParamScalar(self.r0 + o.r0, self.r1 + o.r1, self.ctx)

    __radd__ = __add__

    def __neg__(self):
        return ParamScalar(-self.r0, -self.r1, self.ctx)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        sig = self.ctx.sigma
        return ParamScalar(
            self.r0 * o.r0 + self.r1 * o.r1 * sig,
            self.r0 * o.r1 + self.r1 * o.r0,
            self.ctx,
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except (ContextError, TypeError):
            return NotImplemented
        return self.r0 == o.r0 and self.r1 == o.r1

    def __hash__(self):
        return hash((self.r0, self.r1))

    def __bool__(self):
        return bool(self.r0) or bool(self.r1)

    @property
    def is_rational(self) -> bool:
        return not self.r1 and _frac_is_constant(self.r0)

    def to_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not a rational constant")
        return _frac_constant(self.r0)

    def at(self, a0) -> "ParamScalar":
        """Substitute the exact rational ``a0`` for the parameter."""
        ctx = self.ctx.at(a0)
        field = self.ctx.field
        return ParamScalar(_frac_subs(field, self.r0, a0), _frac_subs(field, self.r1, a0), ctx)

    def evaluate(self, a: float | None = None) -> float:
        if not _frac_is_constant(self.r0) or not _frac_is_constant(self.r1):
            if a is None:
                raise DomainError(f"coefficient {self} depends on {self.ctx.param}; a value is required")
        r0 = _frac_float(self.r0, a) if a is not None else float(_frac_constant(self.r0))
        if not self.r1:
            return r0
        sig = self.ctx.sigma_value(a)
        if sig < 0:
            raise DomainError(f"radicand {self.ctx.sigma.as_expr()} is negative at {self.ctx.param}={a}")
        r1 = _frac_float(self.r1, a) if a is not None else float(_frac_constant(self.r1))
        return r0 + r1 * math.sqrt(sig)

    def to_sympy(self, radical=None):
        s = sp.Symbol(RADICAL) if radical is None else radical
        return self.r0.as_expr() + self.r1.as_expr() * s

    def __str__(self):
        if self.is_rational:
            return str(self.to_fraction())
        if not self.r1:
            return f"({_frac_str(self.r0)})"
        if not self.r0:
            return f"(({_frac_str(self.r1)})*{RADICAL})"
        return f"({_frac_str(self.r0)} + ({_frac_str(self.r1)})*{RADICAL})"

    def __repr__(self):
        return f"ParamScalar({self})"


def _mono_str(vars, m: Monomial) -> str:
    parts = []
    for name, e in zip(vars, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


class BiPoly:
    """Sparse bivariate polynomial {(i, j): coefficient} over a ScalarContext.

    Zero coefficients are never stored, so ``p.is_zero()`` (equivalently
    ``not p.terms``) certifies an identity exactly.
    """

    __slots__ = ("terms", "vars", "ctx")

    def __init__(
        self,
        terms: Mapping[Monomial, object] | None = None,
        vars: Tuple[str, str] = ("x", "y"),
        ctx: ScalarContext | None = None,
    ):
        self.vars = tuple(vars)
        self.ctx = ctx or ScalarContext()
        clean: Dict[Monomial, ParamScalar] = {}
        for m, c in (terms or {}).items():
            if not isinstance(c, ParamScalar):
                c = ParamScalar(c, 0, self.ctx)
            elif c.ctx != self.ctx:
                raise ContextError(f"coefficient context {c.ctx} differs from {self.ctx}")
            if c:
                clean[(int(m[0]), int(m[1]))] = c
        self.terms = clean

    # -- construction -------------------------------------------------------

    @classmethod
    def constant(cls, value, vars=("x", "y"), ctx=None) -> "BiPoly":
        return cls({(0, 0): value}, vars, ctx)

    @classmethod
    def variable(cls, name: str, vars=("x", "y"), ctx=None) -> "BiPoly":
        if name not in vars:
            raise ContextError(f"unknown variable {name!r}; expected one of {vars}")
        m = (1, 0) if name == vars[0] else (0, 1)
        return cls({m: 1}, vars, ctx)

    @classmethod
    def from_sympy(cls, expr, vars=("x", "y"), param="a", sigma=None) -> "BiPoly":
        """Build from a sympy expression in ``vars``, ``param`` and the radical ``s``."""
        ctx = ScalarContext(param, None if sigma is None else _coerce(param_field(param), sigma))
        field = ctx.field
        X, Y, S = sp.Symbol(vars[0]), sp.Symbol(vars[1]), sp.Symbol(RADICAL)
        expr = sp.sympify(expr)
        stray = expr.free_symbols - {X, Y, S, sp.Symbol(param)}
        if stray:
            raise ContextError(f"unexpected symbols {sorted(map(str, stray))}")
        poly = sp.Poly(sp.expand(expr), X, Y, S, domain=field)
        terms: Dict[Monomial, ParamScalar] = {}
        for (i, j, k), coeff in poly.as_dict(native=True).items():
            half, odd = divmod(k, 2)
            scale = ctx.sigma ** half if half else field.one
            c = ParamScalar(0, coeff * scale, ctx) if odd else ParamScalar(coeff * scale, 0, ctx)
            terms[(i, j)] = terms.get((i, j), ParamScalar(0, 0, ctx)) + c
        return cls(terms, vars, ctx)

    @classmethod
    def parse(cls, text: str, vars=("x", "y"), param="a", sigma=None) -> "BiPoly":
        """Parse the plain-text format produced by ``str()``."""
        names = {n: sp.Symbol(n) for n in (*vars, param, RADICAL)}
        if re.search(r"[^0-9A-Za-z_+\-*/^(). \t]", text):
            raise ValueError(f"unexpected character in polynomial text {text!r}")
        expr = parse_expr(
            text,
            local_dict=names,
            transformations=standard_transformations + (convert_xor,),
            evaluate=True,
        )
        return cls.from_sympy(expr, vars, param, sigma)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "BiPoly"):
        if self.vars != other.vars:
            raise ContextError(f"mismatched variables {self.vars} and {other.vars}")
        if self.ctx != other.ctx:
            raise ContextError(f"mismatched coefficient contexts {self.ctx} and {other.ctx}")

    def _lift(self, other) -> "BiPoly":
        if isinstance(other, BiPoly):
            self._check(other)
            return other
        return BiPoly.constant(other, self.vars, self.ctx)

    def __add__(self, other):
        o = self._lift(other)
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out[m] + c if m in out else c
        return BiPoly(out, self.vars, self.ctx)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly({m: -c for m, c in self.terms.items()}, self.vars, self.ctx)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        out: Dict[Monomial, ParamScalar] = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in o.terms.items():
                m = (i1 + i2, j1 + j2)
                prod = c1 * c2
                out[m] = out[m] + prod if m in out else prod
        return BiPoly(out, self.vars, self.ctx)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = BiPoly.constant(1, self.vars, self.ctx)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            try:
                other = self._lift(other)
            except (ContextError, TypeError):
                return NotImplemented
        return self.vars == other.vars and self.ctx == other.ctx and self.terms == other.terms

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.terms), default=-1)

    def coefficient(self, i: int, j: int) -> ParamScalar:
        return self.terms.get((i, j), ParamScalar(0, 0, self.ctx))

    def partial(self, var: str) -> "BiPoly":
        if var not in self.vars:
            raise ContextError(f"unknown variable {var!r}; expected one of {self.vars}")
        k = self.vars.index(var)
        out = {}
        for m, c in self.terms.items():
            e = m[k]
            if e:
                nm = (m[0] - 1, m[1]) if k == 0 else (m[0], m[1] - 1)
                out[nm] = c * e
        return BiPoly(out, self.vars, self.ctx)

    # -- evaluation ---------------------------------------------------------

    def at_param(self, a0) -> "BiPoly":
        """Exact substitution of a rational parameter value."""
        ctx = self.ctx.at(a0)
        return BiPoly({m: c.at(a0) for m, c in self.terms.items()}, self.vars, ctx)

    def exact_eval(self, x, y, a0=None) -> ParamScalar:
        """Exact value at rational (x, y), with the parameter fixed to ``a0`` if given."""
        p = self.at_param(a0) if a0 is not None else self
        x, y = to_fraction(x), to_fraction(y)
        total = ParamScalar(0, 0, p.ctx)
        for (i, j), c in p.terms.items():
            total = total + c * (x ** i * y ** j)
        return total

    def coefficients_at(self, a: float | None) -> Dict[Monomial, float]:
        return {m: c.evaluate(a) for m, c in self.terms.items()}

    def evaluate(self, x: float, y: float, a: float | None = None) -> float:
        return math.fsum(c * x ** i * y ** j for (i, j), c in self.coefficients_at(a).items())

    def compile(self, a: float | None = None) -> Callable:
        """Fast float evaluator ``f(x, y)`` (numpy-broadcasting) at parameter ``a``."""
        coeffs = self.coefficients_at(a)
        if not coeffs:
            return _zero_fn
        parts = []
        for (i, j), c in sorted(coeffs.items()):
            mono = "*".join(["x"] * i + ["y"] * j)
            parts.append(f"({c!r})" + (f"*{mono}" if mono else ""))
        src = "lambda x, y: " + " + ".join(parts)
        if all(i == 0 and j == 0 for i, j in coeffs):
            src += " + 0.0*x"
        return eval(src, {"__builtins__": {}})  # noqa: S307 - generated from floats only

    def to_sympy(self):
        X, Y = sp.Symbol(self.vars[0]), sp.Symbol(self.vars[1])
        return sp.Add(*[c.to_sympy() * X ** i * Y ** j for (i, j), c in self.terms.items()])

    # -- text ---------------------------------------------------------------

    def _ordered(self) -> Iterable[Tuple[Monomial, ParamScalar]]:
        return sorted(self.terms.items(), key=lambda t: (t[0][0] + t[0][1], t[0][0]))

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for m, c in self._ordered():
            mono = _mono_str(self.vars, m)
            if c.is_rational:
                q = c.to_fraction()
                sign = "-" if q < 0 else "+"
                mag = abs(q)
                body = (str(mag) + ("*" + mono if mono else "")) if (mag != 1 or not mono) else mono
            else:
                sign = "+"
                body = str(c) + ("*" + mono if mono else "")
            if not out:
                out.append(("-" if sign == "-" else "") + body)
            else:
                out.append(f" {sign} {body}")
        return "".join(out)

    def __repr__(self):
        extra = ""
        if self.ctx.extended:
            extra = f", s^2={self.ctx.sigma.as_expr()}"
        return f"BiPoly({self}; vars={self.vars}{extra})"


def _zero_fn(x, y):
    return 0.0 * x


def poly_arithmetic(lhs: BiPoly, rhs: BiPoly, op: str) -> BiPoly:
    """Exact ``lhs op rhs`` for op in {'add', 'sub', 'mul'}."""
    if not isinstance(rhs, BiPoly) or not isinstance(lhs, BiPoly):
        raise TypeError("both operands must be BiPoly")
    lhs._check(rhs)
    try:
        return {"add": BiPoly.__add__, "sub": BiPoly.__sub__, "mul": BiPoly.__mul__}[op](lhs, rhs)
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None


def poly_partial(p: BiPoly, var: str) -> BiPoly:
    return p.partial(var)


def poly_eval(p: BiPoly, x: float, y: float, a: float | None = None) -> float:
    return p.evaluate(x, y, a)
