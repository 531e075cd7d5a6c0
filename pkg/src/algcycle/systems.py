"""Catalog of planar systems with invariant curves, and the checks run on them.

Every polynomial entry carries exact ``BiPoly`` data, so the invariance
identity ``P*f_x + Q*f_y - k*f == 0`` is verified symbolically.  The single
transcendental system (``nalc``: curve ``y^2 - cos x = 0``) is stored as
closed-form evaluators with hand-coded partial derivatives.

Two families are also available in transformed coordinates (``fil_transformed``
and ``ch1_transformed``); they are linked to their source systems by a
``BirationalMap`` that records the time reparameterization and whether it
reverses the flow.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from .algebra import BiPoly, to_fraction
from .errors import ContextError, DomainError, PreconditionError

__all__ = [
    "VectorField",
    "CurveFunctions",
    "PlanarSystem",
    "InvariantCurve",
    "BirationalMap",
    "CatalogEntry",
    "CATALOG_IDS",
    "ALIASES",
    "divergence",
    "cofactor_residual",
    "pointwise_residual",
    "catalog_instantiate",
    "transform_divergence_check",
    "gradient_nonvanishing_check",
    "filipstov_map",
    "chavarriga_map",
    "catalog_json",
]

Point = Tuple[float, float]


# ---------------------------------------------------------------------------
# Numeric views (parameter already fixed)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VectorField:
    """Float evaluators for P, Q and their first partials."""

    P: Callable
    Q: Callable
    P_x: Callable
    P_y: Callable
    Q_x: Callable
    Q_y: Callable
    vars: Tuple[str, str] = ("x", "y")

    def __call__(self, x, y):
        return self.P(x, y), self.Q(x, y)

    def divergence(self, x, y):
        return self.P_x(x, y) + self.Q_y(x, y)

    def jacobian(self, x, y) -> np.ndarray:
        return np.array([[self.P_x(x, y), self.P_y(x, y)], [self.Q_x(x, y), self.Q_y(x, y)]])


@dataclass(frozen=True)
class CurveFunctions:
    """Float evaluators for an invariant curve f = 0, its gradient and cofactor."""

    f: Callable
    f_x: Callable
    f_y: Callable
    k: Callable

    def gradient(self, x, y) -> np.ndarray:
        return np.array([self.f_x(x, y), self.f_y(x, y)])


def _field_from_polys(P: BiPoly, Q: BiPoly, a) -> VectorField:
    u, v = P.vars
    return VectorField(
        P.compile(a),
        Q.compile(a),
        P.partial(u).compile(a),
        P.partial(v).compile(a),
        Q.partial(u).compile(a),
        Q.partial(v).compile(a),
        P.vars,
    )


# ---------------------------------------------------------------------------
# Systems and curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlanarSystem:
    """x' = P(x, y), y' = Q(x, y).

    Either ``P`` and ``Q`` are exact polynomials, or ``evaluator`` builds the
    numeric field for a parameter value (transcendental systems).
    """

    name: str
    P: Optional[BiPoly] = None
    Q: Optional[BiPoly] = None
    evaluator: Optional[Callable[[Optional[float]], VectorField]] = None
    divergence_fn: Optional[Callable] = None

    def __post_init__(self):
        if self.evaluator is None and (self.P is None or self.Q is None):
            raise ValueError("a system needs P and Q polynomials or an evaluator")
        if self.P is not None and self.Q is not None:
            if self.P.vars != self.Q.vars or self.P.ctx != self.Q.ctx:
                raise ContextError("P and Q must share variables and coefficient context")

    @property
    def transcendental(self) -> bool:
        return self.evaluator is not None

    @property
    def vars(self):
        return self.P.vars if self.P is not None else ("x", "y")

    def at(self, param: Optional[float] = None) -> VectorField:
        if self.evaluator is not None:
            return self.evaluator(param)
        return _field_from_polys(self.P, self.Q, param)


@dataclass(frozen=True)
class InvariantCurve:
    """f = 0 with cofactor k, either as exact polynomials or as an evaluator."""

    name: str
    f: Optional[BiPoly] = None
    k: Optional[BiPoly] = None
    evaluator: Optional[Callable[[Optional[float]], CurveFunctions]] = None

    @property
    def polynomial(self) -> bool:
        return self.evaluator is None

    def at(self, param: Optional[float] = None) -> CurveFunctions:
        if self.evaluator is not None:
            return self.evaluator(param)
        u, v = self.f.vars
        return CurveFunctions(
            self.f.compile(param),
            self.f.partial(u).compile(param),
            self.f.partial(v).compile(param),
            self.k.compile(param),
        )


def divergence(system: PlanarSystem):
    """Exact divergence P_x + Q_y, or a float evaluator for transcendental systems."""
    if system.transcendental:
        if system.divergence_fn is not None:
            return system.divergence_fn
        return lambda x, y, param=None: system.at(param).divergence(x, y)
    u, v = system.P.vars
    return system.P.partial(u) + system.Q.partial(v)


def cofactor_residual(system: PlanarSystem, curve: InvariantCurve, param=None) -> BiPoly:
    """The exact polynomial P*f_x + Q*f_y - k*f; zero certifies invariance.

    With ``param`` (an exact rational) the parameter is substituted first.
    """
    if system.transcendental or not curve.polynomial:
        raise PreconditionError(f"{system.name}: no polynomial representation; use pointwise_residual")
    P, Q, f, k = system.P, system.Q, curve.f, curve.k
    if param is not None:
        a0 = to_fraction(param)
        P, Q, f, k = (p.at_param(a0) for p in (P, Q, f, k))
    u, v = f.vars
    return P * f.partial(u) + Q * f.partial(v) - k * f


def pointwise_residual(field_: VectorField, curve: CurveFunctions, pts: Iterable[Point]) -> float:
    """max |P f_x + Q f_y - k f| over the sample points."""
    pts = np.asarray(list(pts), dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    res = field_.P(x, y) * curve.f_x(x, y) + field_.Q(x, y) * curve.f_y(x, y) - curve.k(x, y) * curve.f(x, y)
    return float(np.max(np.abs(res))) if len(pts) else 0.0


def gradient_nonvanishing_check(curve: CurveFunctions, pts: Iterable[Point], on_curve_tol: float = 1e-10) -> float:
    """Minimum ||grad f|| over points that lie on f = 0.

    A point counts as on the curve when |f| <= tol * max(1, ||grad f|| * ||p||),
    which keeps the test meaningful for curves with large coefficients.
    """
    pts = np.asarray(list(pts), dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    fv = np.abs(curve.f(x, y)) + 0.0 * x
    g = np.hypot(curve.f_x(x, y) + 0.0 * x, curve.f_y(x, y) + 0.0 * x)
    scale = np.maximum(1.0, g * np.hypot(x, y))
    bad = np.nonzero(fv > on_curve_tol * scale)[0]
    if bad.size:
        i = int(bad[0])
        raise PreconditionError(f"point ({x[i]!r}, {y[i]!r}) is not on the curve: |f| = {fv[i]:.3e}")
    return float(np.min(g))


# ---------------------------------------------------------------------------
# Birational changes of variables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BirationalMap:
    """(x, y) = forward(u, v), (u, v) = inverse(x, y).

    ``jacobian`` is det d(x, y)/d(u, v).  ``time_factor`` h(u, v) is the
    factor the transformed vector field was multiplied by; ``orientation``
    is +1 when h > 0 on the oval and -1 when the reparameterization reverses
    the direction of the flow.
    """

    name: str
    forward: Callable
    inverse: Callable
    jacobian: Callable
    jacobian_grad: Callable
    time_factor: Callable
    time_factor_grad: Callable
    orientation: int
    inverse_jacobian_printed: Optional[Callable] = None

    def pushforward(self, source: VectorField) -> Callable:
        """(u, v) -> (R, S), the source field written in (u, v) before any time change."""

        def rs(u, v):
            x, y = self.forward(u, v)
            J = self.forward_matrix(u, v)
            return tuple(np.linalg.solve(J, np.array(source(x, y), dtype=float)))

        return rs

    def forward_matrix(self, u, v) -> np.ndarray:
        return np.array(self._dforward(u, v), dtype=float)

    @property
    def _dforward(self):
        return self.__dict__["_dfwd"]

    def unreparameterize(self, field_: VectorField) -> VectorField:
        """Divide a transformed field by the time factor, with exact quotient-rule partials."""
        h, hg = self.time_factor, self.time_factor_grad

        def R(u, v):
            return field_.P(u, v) / h(u, v)

        def S(u, v):
            return field_.Q(u, v) / h(u, v)

        def R_u(u, v):
            hv = h(u, v)
            return field_.P_x(u, v) / hv - field_.P(u, v) * hg(u, v)[0] / hv**2

        def R_v(u, v):
            hv = h(u, v)
            return field_.P_y(u, v) / hv - field_.P(u, v) * hg(u, v)[1] / hv**2

        def S_u(u, v):
            hv = h(u, v)
            return field_.Q_x(u, v) / hv - field_.Q(u, v) * hg(u, v)[0] / hv**2

        def S_v(u, v):
            hv = h(u, v)
            return field_.Q_y(u, v) / hv - field_.Q(u, v) * hg(u, v)[1] / hv**2

        return VectorField(R, S, R_u, R_v, S_u, S_v, field_.vars)


def _build_map(name, X, Y, U, V, h, orientation, inv_jac, p, pval) -> BirationalMap:
    u, v, x, y = sp.symbols("u v x y")
    subs = {p: pval}
    X, Y, U, V, h = (sp.sympify(e).subs(subs) for e in (X, Y, U, V, h))
    dX = [[sp.diff(X, u), sp.diff(X, v)], [sp.diff(Y, u), sp.diff(Y, v)]]
    J = dX[0][0] * dX[1][1] - dX[0][1] * dX[1][0]
    lam = functools.partial(sp.lambdify, modules="numpy")
    fwd = lam((u, v), (X, Y))
    inv = lam((x, y), (U, V))
    Jf = lam((u, v), J)
    Jg = lam((u, v), (sp.diff(J, u), sp.diff(J, v)))
    hf = lam((u, v), h)
    hg = lam((u, v), (sp.diff(h, u), sp.diff(h, v)))
    dfwd = lam((u, v), dX)
    ij = lam((x, y), sp.sympify(inv_jac).subs(subs)) if inv_jac is not None else None
    m = BirationalMap(name, fwd, inv, Jf, Jg, hf, hg, orientation, ij)
    m.__dict__["_dfwd"] = dfwd
    return m


@functools.lru_cache(maxsize=64)
def filipstov_map(c: float) -> BirationalMap:
    """Change of variables taking the Filipstov system to its (u, v) form."""
    c_ = sp.Symbol("c")
    u, v, x, y = sp.symbols("u v x y")
    r = sp.sqrt(1 + 2 * c_)
    base = c_ - 2 * (1 + c_) * u + c_ * u**2 - 2 * r * v
    X = -2 * (1 + 2 * c_) / (c_**2 * (1 + u) ** 3) * base
    Y = -12 * (1 + 2 * c_) ** 2 / (c_**2 * (4 + 5 * c_) * (1 + u) ** 4) * base
    U = 6 * (1 + 2 * c_) * x / ((4 + 5 * c_) * y) - 1
    V = (
        r
        / ((4 + 5 * c_) ** 3 * y**3)
        * ((1 + 2 * c_) * (54 * c_**2 * x**4 + 18 * c_ * (4 + 5 * c_) * x**2 * y - 6 * (4 + 5 * c_) ** 2 * x * y**2))
        + r
    )
    h = c_**2 * (4 + 5 * c_) * (1 + u) ** 3 / (12 * (1 + 2 * c_))
    inv_jac = 324 * c_**2 * (1 + 2 * c_) ** sp.Rational(5, 2) * x**4 / ((4 + 5 * c_) ** 4 * y**5)
    return _build_map("filipstov", X, Y, U, V, h, +1, inv_jac, c_, float(c))


@functools.lru_cache(maxsize=64)
def chavarriga_map(a: float) -> BirationalMap:
    """Change of variables taking the Chavarriga system to its (u, v) form."""
    a_ = sp.Symbol("a")
    u, v, x, y = sp.symbols("u v x y")
    d = v + 1 + u + 2 * a_ * u**2
    X, Y = -2 / d, -2 * u / d
    U = y / x
    V = -2 * a_ * y**2 / x**2 - (y + 2) / x - 1
    inv_jac = -2 / x**3
    return _build_map("chavarriga", X, Y, U, V, d, -1, inv_jac, a_, float(a))


def transform_divergence_check(
    map_: BirationalMap, src: VectorField, dst: VectorField, samples: Iterable[Point], jac_floor: float = 1e-12
) -> float:
    """max over samples of |div_src(X, Y) - [div_dst + (J_u R + J_v S) / J]|.

    ``dst`` must be the pure change of variables of ``src`` (no time factor);
    see ``BirationalMap.unreparameterize``.
    """
    worst = 0.0
    for u, v in samples:
        J = float(map_.jacobian(u, v))
        if abs(J) < jac_floor:
            raise PreconditionError(f"jacobian {J:.3e} below {jac_floor} at sample ({u}, {v})")
        Ju, Jv = map_.jacobian_grad(u, v)
        x, y = map_.forward(u, v)
        lhs = src.divergence(x, y)
        R, S = dst(u, v)
        rhs = dst.divergence(u, v) + (Ju * R + Jv * S) / J
        worst = max(worst, abs(float(lhs - rhs)))
    return worst


# ---------------------------------------------------------------------------
# The catalog
# ---------------------------------------------------------------------------

CATALOG_IDS = (
    "nalc",
    "chin2",
    "yablonskii",
    "filipstov",
    "chavarriga",
    "chlls",
    "fil_transformed",
    "ch1_transformed",
)

ALIASES = {
    "chin": "chin2",
    "yab": "yablonskii",
    "ch2": "chlls",
    "fil": "fil_transformed",
    "ch1": "ch1_transformed",
}

# Exact polynomial data, in the text format of ``BiPoly.parse``.
_CHLLS = dict(
    P="2*(1 + 2*x - 2*a*x^2 + 6*x*y)",
    Q="8 - 3*a - 14*a*x - 2*a*x*y - 8*y^2",
    f="1/4 + x - x^2 + a*x^3 + x*y + x^2*y^2",
    k="4*(2 - 3*a*x + 2*y)",
)
_FILIPSTOV = dict(
    P="6*(1 + a)*x + 2*y - 6*(2 + a)*x^2 + 12*x*y",
    Q="15*(1 + a)*y + 3*a*(1 + a)*x^2 - 2*(9 + 5*a)*x*y + 16*y^2",
    f="3*(1 + a)*(a*x^2 + y)^2 + 2*y^2*(2*y - 3*(1 + a)*x)",
    k="6*(5 + 5*a - (8 + 4*a)*x + 8*y)",
)
_CHAVARRIGA = dict(
    P="5*x + 6*x^2 + 4*(1 + a)*x*y + a*y^2",
    Q="x + 2*y + 4*x*y + (2 + 3*a)*y^2",
    f="x^2 + x^3 + x^2*y + 2*a*x*y^2 + 2*a*x*y^3 + a^2*y^4",
    k="2*(5 + 9*x + 5*y + 6*a*y)",
)
_FIL_TRANSFORMED = dict(
    P="-2*u*(c*u + 4 + 9*c)*(c*u^2 - u + c) - 2*s*(c*u^2 - (4 + 5*c)*u + 2*c)*v",
    Q="-c^2*s*(u + 1)^2*(u - 1)*(3*u + 2) - (c*u + 4 + 9*c)*(3*c*u^2 - 2*u + c)*v"
    " + 2*s*(4 + 5*c - 3*c*u)*v^2",
    f="v^2 + u*(c*u^2 - u + c)",
    k="4*s*(4 + 5*c - 3*c*u)*v - 2*(c*u + 9*c + 4)*(3*c*u^2 - 2*u + c)",
)
_CH1_TRANSFORMED = dict(
    P="(u + 1)^2 - 4*a*u^2*(u - 1) + (1 - 3*u)*v",
    Q="2*(u + 1)*(3 + u + 2*a*u - a*u^2) + (1 + 4*a*u + u - 6*a*u^2)*v - 5*v^2",
    f="v^2 + 4*a*u^2*(u - 1) - (u + 1)^2",
    k="2*(1 + u + 4*a*u - 6*a*u^2 - 5*v)",
)
_CHIN = dict(
    P="-y*(a*x + b*y + c) - (x^2 + y^2 - 1)",
    Q="x*(a*x + b*y + c)",
    f="x^2 + y^2 - 1",
    k="-2*x",
)
# The cofactor of the Yablonskii curve is not printed with the system; it was
# obtained once by exact division and is re-verified by cofactor_residual.
_YABLONSKII = dict(
    P="-4*a*b*c*x - (a + b)*y + 3*(a + b)*c*x^2 + 4*x*y",
    Q="(a + b)*a*b*x - 4*a*b*c*y + (4*a*b*c^2 - 3/2*(a + b)^2 + 4*a*b)*x^2 + 8*(a + b)*c*x*y + 8*y^2",
    f="(y + c*x^2)^2 + x^2*(x - a)*(x - b)",
    k="4*(3*(a + b)*c*x + 4*y - 2*a*b*c)",
)

SQRT17 = math.sqrt(17.0)
CHAVARRIGA_LOWER = (-71.0 + 17.0 * SQRT17) / 32.0


@functools.lru_cache(maxsize=None)
def _family_polys(key: str):
    table = {"chlls": (_CHLLS, ("x", "y"), "a", None),
             "filipstov": (_FILIPSTOV, ("x", "y"), "a", None),
             "chavarriga": (_CHAVARRIGA, ("x", "y"), "a", None),
             "fil_transformed": (_FIL_TRANSFORMED, ("u", "v"), "c", sp.Symbol("c") * 2 + 1),
             "ch1_transformed": (_CH1_TRANSFORMED, ("u", "v"), "a", None)}
    data, vars, param, sigma = table[key]
    return {name: BiPoly.parse(text, vars, param, sigma) for name, text in data.items()}


def _three_param_polys(data: Mapping[str, str], a, b, c):
    """Substitute exact rationals for a, b, c and return constant-coefficient polynomials."""
    sa, sb, sc = sp.symbols("a b c")
    subs = {sa: sp.Rational(a.numerator, a.denominator), sb: sp.Rational(b.numerator, b.denominator),
            sc: sp.Rational(c.numerator, c.denominator)}
    x, y = sp.symbols("x y")
    out = {}
    for name, text in data.items():
        expr = sp.sympify(text.replace("^", "**"), locals={"a": sa, "b": sb, "c": sc, "x": x, "y": y})
        out[name] = BiPoly.from_sympy(expr.subs(subs), ("x", "y"), "a")
    return out


def _exact_or_float(v):
    if isinstance(v, float):
        return v
    return to_fraction(v)


def _gt_sqrt(lhs, coeff, radicand) -> bool:
    """lhs > coeff*sqrt(radicand) for exact lhs, with coeff, radicand >= 0."""
    if isinstance(lhs, float):
        return lhs > coeff * math.sqrt(radicand)
    if lhs <= 0:
        return False
    return lhs * lhs > coeff * coeff * radicand


def _check_domain(entry_id: str, p: Mapping[str, object]) -> List[str]:
    """Return the printed inequalities that ``p`` violates."""
    bad = []
    if entry_id == "nalc":
        if int(p["n"]) != p["n"]:
            bad.append("n integer")
    elif entry_id in ("chin2",):
        a, b, c = p["a"], p["b"], p["c"]
        if not a != 0:
            bad.append("a != 0")
        if not c * c + 4 * (b + 1) > 0:
            bad.append("c^2 + 4(b+1) > 0")
        if not c * c > a * a + b * b:
            bad.append("c^2 > a^2 + b^2")
    elif entry_id == "yablonskii":
        a, b, c = p["a"], p["b"], p["c"]
        if not a * b * c != 0:
            bad.append("abc != 0")
        if not a != b:
            bad.append("a != b")
        if not a * b > 0:
            bad.append("ab > 0")
        if not 4 * c * c * (a - b) ** 2 + (3 * a - b) * (a - 3 * b) < 0:
            bad.append("4c^2(a-b)^2 + (3a-b)(a-3b) < 0")
    elif entry_id == "filipstov":
        a = p["a"]
        if not 0 < a < Fraction(3, 13):
            bad.append("0 < a < 3/13")
    elif entry_id == "chavarriga" or entry_id == "ch1_transformed":
        a = p["a"]
        # (-71 + 17 sqrt 17)/32 < a  <=>  32a + 71 > 17 sqrt 17
        if not (a < 0 and _gt_sqrt(32 * a + 71, 17, 17)):
            bad.append("(-71 + 17*sqrt(17))/32 < a < 0")
    elif entry_id == "chlls":
        a = p["a"]
        if not 0 < a < Fraction(1, 4):
            bad.append("0 < a < 1/4")
    elif entry_id == "fil_transformed":
        c = p["c"]
        if not 0 < c < Fraction(1, 2):
            bad.append("0 < c < 1/2")
    return bad


_PARAMS = {
    "nalc": ("n",),
    "chin2": ("a", "b", "c"),
    "yablonskii": ("a", "b", "c"),
    "filipstov": ("a",),
    "chavarriga": ("a",),
    "chlls": ("a",),
    "fil_transformed": ("c",),
    "ch1_transformed": ("a",),
}

_DOMAIN_TEXT = {
    "nalc": ("n integer (oval in the strip |x - 2*pi*n| <= pi/2)",),
    "chin2": ("a != 0", "c^2 + 4(b+1) > 0", "c^2 > a^2 + b^2"),
    "yablonskii": ("abc != 0", "a != b", "ab > 0", "4c^2(a-b)^2 + (3a-b)(a-3b) < 0"),
    "filipstov": ("0 < a < 3/13",),
    "chavarriga": ("(-71 + 17*sqrt(17))/32 < a < 0",),
    "chlls": ("0 < a < 1/4",),
    "fil_transformed": ("0 < c < 1/2",),
    "ch1_transformed": ("(-71 + 17*sqrt(17))/32 < a < 0",),
}


@dataclass(eq=False)
class CatalogEntry:
    """One system of the catalog, instantiated at concrete parameter values."""

    id: str
    system: PlanarSystem
    curve: InvariantCurve
    params: Dict[str, object]
    param_domain: Tuple[str, ...]
    expected_stability: Optional[str]
    orientation: Optional[str] = None
    family_param: Optional[str] = None
    transform: Optional[BirationalMap] = None
    source_id: Optional[str] = None
    time_orientation: int = 1
    note: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def param_value(self) -> Optional[float]:
        """Float value of the single family parameter (None for fixed-coefficient entries)."""
        if self.family_param is None:
            return None
        return float(self.params[self.family_param])

    @property
    def exact_param(self):
        if self.family_param is None:
            return None
        v = self.params[self.family_param]
        return Fraction(v) if isinstance(v, float) else v

    def vector_field(self) -> VectorField:
        if "field" not in self._cache:
            self._cache["field"] = self.system.at(self.param_value)
        return self._cache["field"]

    def curve_functions(self) -> CurveFunctions:
        if "curve" not in self._cache:
            self._cache["curve"] = self.curve.at(self.param_value)
        return self._cache["curve"]

    @property
    def oval_chart(self):
        """Explicit two-branch chart of the oval, or None when the family has none."""
        if "chart" not in self._cache:
            from .ovalquad import oval_chart

            self._cache["chart"] = oval_chart(self)
        return self._cache["chart"]

    def source_entry(self) -> Optional["CatalogEntry"]:
        """The untransformed system this entry was derived from."""
        if self.source_id is None:
            return None
        v = self.params[self.family_param]
        if self.id == "fil_transformed":
            c = v
            a = 3 * c / (4 + 5 * c)
            return catalog_instantiate("filipstov", {"a": a})
        return catalog_instantiate(self.source_id, {self.family_param: v})

    def oval_point(self) -> Point:
        """A point of the limit cycle (a turning point of the chart, mapped if needed)."""
        chart = self.oval_chart
        if chart is not None:
            return chart.endpoint(0)
        if self.id == "filipstov":
            t = catalog_instantiate("fil_transformed", {"c": self.params_c()})
            u, v = t.oval_point()
            x, y = filipstov_map(float(self.params_c())).forward(u, v)
            return float(x), float(y)
        if self.id == "chavarriga":
            t = catalog_instantiate("ch1_transformed", {"a": self.params["a"]})
            u, v = t.oval_point()
            x, y = chavarriga_map(self.param_value).forward(u, v)
            return float(x), float(y)
        raise PreconditionError(f"{self.id}: no known point on the oval")

    def params_c(self):
        """Filipstov's a mapped to c = 4a/(3 - 5a)."""
        a = self.params["a"]
        return 4 * a / (3 - 5 * a)

    def to_json_dict(self) -> dict:
        sysd = {}
        if self.system.P is not None:
            sysd = {"P": str(self.system.P), "Q": str(self.system.Q)}
        cur = {}
        if self.curve.f is not None:
            cur = {"f": str(self.curve.f), "k": str(self.curve.k)}
        if self.system.transcendental:
            sysd = {"P": "(x + y)*cos(x) - y*(x^2 + x*y + 2*y^2)",
                    "Q": "(y - x)*(cos(x) - y^2) + (x^2 + y^2)/2*sin(x)"}
            cur = {"f": "y^2 - cos(x)", "k": "2*y*(x - y) - (x + y)*sin(x)"}
        out = {
            "id": self.id,
            "params": {k: str(v) for k, v in self.params.items()},
            "parameter_domain": list(self.param_domain),
            "variables": list(self.system.vars),
            "system": sysd,
            "curve": cur,
            "expected_stability": self.expected_stability,
            "orientation": self.orientation,
            "references": self.note,
        }
        if self.system.P is not None and self.system.P.ctx.extended:
            out["radical"] = f"s^2 = {self.system.P.ctx.sigma.as_expr()}"
        if self.source_id:
            out["source"] = self.source_id
            out["time_orientation"] = self.time_orientation
        return out


# -- the transcendental example ---------------------------------------------


def _nalc_field(_param=None) -> VectorField:
    cos, sin = np.cos, np.sin

    def P(x, y):
        return (x + y) * cos(x) - y * (x * x + x * y + 2 * y * y)

    def Q(x, y):
        return (y - x) * (cos(x) - y * y) + 0.5 * (x * x + y * y) * sin(x)

    def P_x(x, y):
        return cos(x) - (x + y) * sin(x) - y * (2 * x + y)

    def P_y(x, y):
        return cos(x) - (x * x + 2 * x * y + 6 * y * y)

    def Q_x(x, y):
        return -(cos(x) - y * y) - (y - x) * sin(x) + x * sin(x) + 0.5 * (x * x + y * y) * cos(x)

    def Q_y(x, y):
        return (cos(x) - y * y) - 2 * y * (y - x) + y * sin(x)

    return VectorField(P, Q, P_x, P_y, Q_x, Q_y)


def _nalc_divergence(x, y, param=None):
    return -4 * y * y + 2 * np.cos(x) - x * np.sin(x)


def _nalc_curve(_param=None) -> CurveFunctions:
    return CurveFunctions(
        lambda x, y: y * y - np.cos(x),
        lambda x, y: np.sin(x) + 0.0 * y,
        lambda x, y: 2 * y + 0.0 * x,
        lambda x, y: 2 * y * (x - y) - (x + y) * np.sin(x),
    )


_NALC_SYSTEM = PlanarSystem("nalc", evaluator=_nalc_field, divergence_fn=_nalc_divergence)
_NALC_CURVE = InvariantCurve("y^2 - cos x", evaluator=_nalc_curve)


def _normalize_params(entry_id: str, params: Mapping[str, object]) -> Dict[str, object]:
    out = {}
    for name in _PARAMS[entry_id]:
        if name not in params or params[name] is None:
            if entry_id == "nalc" and name == "n":
                out[name] = 0
                continue
            raise PreconditionError(f"{entry_id}: missing parameter {name!r}")
        out[name] = _exact_or_float(params[name])
    extra = set(params) - set(_PARAMS[entry_id]) - {k for k, v in params.items() if v is None}
    if extra:
        raise PreconditionError(f"{entry_id}: unexpected parameters {sorted(extra)}")
    return out


def catalog_instantiate(entry_id: str, params: Optional[Mapping[str, object]] = None) -> CatalogEntry:
    """Validate parameters against the family's domain and build the entry.

    Parameters may be exact (int, Fraction, decimal string) or float.  A
    violated inequality raises DomainError naming it.
    """
    entry_id = ALIASES.get(entry_id, entry_id)
    if entry_id not in CATALOG_IDS:
        raise PreconditionError(f"unknown system {entry_id!r}; choose from {', '.join(CATALOG_IDS)}")
    p = _normalize_params(entry_id, params or {})
    bad = _check_domain(entry_id, p)
    if bad:
        raise DomainError(f"{entry_id}: parameters {p} violate {'; '.join(bad)}")
    domain = _DOMAIN_TEXT[entry_id]

    if entry_id == "nalc":
        n = int(p["n"])
        return CatalogEntry(
            "nalc", _NALC_SYSTEM, _NALC_CURVE, {"n": n}, domain,
            "stable" if n == 0 else "center_band",
            family_param="n",
            note="transcendental example with invariant curve y^2 = cos x",
        )
    if entry_id in ("chin2", "yablonskii"):
        a, b, c = (Fraction(p[k]) for k in ("a", "b", "c"))
        data = _CHIN if entry_id == "chin2" else _YABLONSKII
        polys = _three_param_polys(data, a, b, c)
        note = ("degree-2 algebraic limit cycle (the unit circle)" if entry_id == "chin2"
                else "Yablonskii's degree-4 algebraic limit cycle")
        return CatalogEntry(
            entry_id,
            PlanarSystem(entry_id, polys["P"], polys["Q"]),
            InvariantCurve(entry_id, polys["f"], polys["k"]),
            p, domain,
            expected_stability=None,
            note=note,
        )

    polys = _family_polys(entry_id)
    system = PlanarSystem(entry_id, polys["P"], polys["Q"])
    curve = InvariantCurve(entry_id, polys["f"], polys["k"])
    name = _PARAMS[entry_id][0]
    meta = {
        "filipstov": dict(expected_stability="unstable", note="Filipstov's degree-4 algebraic limit cycle"),
        "chavarriga": dict(expected_stability="stable", note="Chavarriga's degree-4 algebraic limit cycle"),
        "chlls": dict(expected_stability="unstable", orientation="clockwise",
                      note="Chavarriga-Llibre-Sorolla degree-4 algebraic limit cycle"),
        "fil_transformed": dict(
            expected_stability="unstable", orientation="clockwise", source_id="filipstov", time_orientation=+1,
            transform=filipstov_map(float(p[name])),
            note="Filipstov system after the birational change of variables and a positive time factor"),
        "ch1_transformed": dict(
            expected_stability="unstable", orientation="clockwise", source_id="chavarriga", time_orientation=-1,
            transform=chavarriga_map(float(p[name])),
            note="Chavarriga system after the birational change of variables; the time factor reverses the flow"),
    }[entry_id]
    return CatalogEntry(entry_id, system, curve, p, domain, family_param=name, **meta)


def catalog_json(entries: Sequence[CatalogEntry]) -> dict:
    return {"schema": 1, "entries": [e.to_json_dict() for e in entries]}
