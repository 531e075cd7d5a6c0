"""Oval charts, endpoint-singular quadrature, and the hyperbolicity integral D.

Each chart writes the oval as x = tau, y = y_pm(tau) for tau in [tau1, tau2],
with y_+ and y_- meeting where the radicand g(tau) vanishes.  Along a branch
dtau = P dt, so a time integral over the cycle becomes

    int_0^T h dt = int_{tau1}^{tau2} [h/|P|](tau, y_+) + [h/|P|](tau, y_-) dtau,

whose integrand has inverse square-root endpoint singularities.  The reduced
integrands are the w = -3 combinations of div and k on the three families
where they become strictly positive; their endpoints behave like sqrt.

Both kinds are handled by the substitution tau = m + r sin(theta), after
which the integrand is smooth, followed by adaptive Gauss-Legendre.  The
distances tau - tau1 and tau2 - tau are passed separately so that radicands
stay accurate next to the turning points.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import AlgCycleError, ConvergenceError, DomainError, PreconditionError

__all__ = [
    "QuadratureSpec",
    "quadrature",
    "OvalChart",
    "oval_chart",
    "oval_endpoints",
    "HyperbolicityResult",
    "reduced_hyperbolicity_integral",
    "raw_divergence_integral",
    "raw_integrand",
    "reduced_integrand",
    "chin_closed_form",
    "hyperbolicity",
    "HyperbolicityReport",
    "sweep",
    "sweep_csv",
    "REDUCED_W",
]

REDUCED_W = -3


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """How to integrate over [a, b].

    method: ``gauss_legendre_on_sine_substitution`` or ``tanh_sinh``.
    sqrt_endpoints: apply tau = m + r sin(theta) first (Gauss-Legendre only).
    """

    method: str = "gauss_legendre_on_sine_substitution"
    abs_tol: float = 1e-14
    rel_tol: float = 1e-13
    max_level: int = 40
    sqrt_endpoints: bool = True

    def __post_init__(self):
        if self.method not in ("gauss_legendre_on_sine_substitution", "tanh_sinh"):
            raise PreconditionError(f"unknown quadrature method {self.method!r}")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise PreconditionError("quadrature tolerances must be positive")


_GL20 = np.polynomial.legendre.leggauss(20)
_GL10 = np.polynomial.legendre.leggauss(10)


def _call(fn, x, dl, dr, distances):
    return fn(x, dl, dr) if distances else fn(x)


# A panel whose two estimates differ by less than this many ulps of its
# absolute integral has reached the rounding floor and is accepted.
_ROUNDOFF_ULPS = 256


def _gl_panel(F, lo, hi):
    c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
    f20 = F(c + h * _GL20[0])
    i20 = h * np.dot(_GL20[1], f20)
    i10 = h * np.dot(_GL10[1], F(c + h * _GL10[0]))
    floor = _ROUNDOFF_ULPS * np.finfo(float).eps * h * np.dot(_GL20[1], np.abs(f20))
    return i20, abs(i20 - i10), floor


def _adaptive_gl(F, lo, hi, spec: QuadratureSpec):
    total, err, floor = _gl_panel(F, lo, hi)
    width = hi - lo
    stack = [(lo, hi, total, err, floor, 0)]
    done_val, done_err = 0.0, 0.0
    while stack:
        a, b, v, e, fl, lvl = stack.pop()
        target = max(spec.abs_tol, spec.rel_tol * abs(total)) * (b - a) / width
        if e <= target or e <= fl:
            done_val += v
            done_err += e
            continue
        if lvl >= spec.max_level:
            raise ConvergenceError(f"adaptive Gauss-Legendre exceeded {spec.max_level} levels",
                                   estimate=done_val + v + sum(s[2] for s in stack))
        m = 0.5 * (a + b)
        v1, e1, f1 = _gl_panel(F, a, m)
        v2, e2, f2 = _gl_panel(F, m, b)
        total += v1 + v2 - v
        stack.append((a, m, v1, e1, f1, lvl + 1))
        stack.append((m, b, v2, e2, f2, lvl + 1))
    return float(done_val), float(done_err)


def _tanh_sinh(fn, a, b, spec: QuadratureSpec, distances: bool):
    m, r = 0.5 * (a + b), 0.5 * (b - a)
    # wide enough for inverse-square-root endpoints, whose terms decay only like exp(-u);
    # at t = 6 the endpoint distance is still a normal float (about 1e-275)
    t_max = 6.0

    def contrib(t):
        u = 0.5 * math.pi * np.sinh(t)
        w = 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
        # distance to the nearer endpoint without cancellation: r (1 - tanh|u|)
        near = r * 2.0 / (1.0 + np.exp(2.0 * np.abs(u)))
        th = np.tanh(u)
        dl = np.where(u < 0, near, r * (1.0 + th))
        dr = np.where(u > 0, near, r * (1.0 - th))
        x = np.where(u < 0, a + dl, b - dr)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            terms = w * _call(fn, x, dl, dr, distances)
        return r * np.sum(np.where(w > 0, terms, 0.0))

    h = 1.0
    n = int(t_max / h)
    s = contrib(np.arange(-n, n + 1) * h)
    prev = h * s
    for level in range(1, spec.max_level + 1):
        h /= 2
        n = int(t_max / h)
        j = np.arange(-n, n + 1)
        s += contrib(j[j % 2 == 1] * h)
        cur = h * s
        err = abs(cur - prev)
        if level >= 3 and err <= max(spec.abs_tol, spec.rel_tol * abs(cur)):
            return float(cur), float(err)
        prev = cur
    raise ConvergenceError(f"tanh-sinh did not converge within {spec.max_level} levels", estimate=float(prev))


def quadrature(fn: Callable, a: float, b: float, spec: Optional[QuadratureSpec] = None, distances: bool = False):
    """Integrate fn over [a, b]; return (value, error estimate).

    fn must accept numpy arrays.  With ``distances=True`` it is called as
    fn(x, x - a, b - x) with both distances computed without cancellation.
    """
    spec = spec or QuadratureSpec()
    if not a < b:
        raise PreconditionError(f"need a < b, got [{a}, {b}]")
    if spec.method == "tanh_sinh":
        return _tanh_sinh(fn, a, b, spec, distances)
    if spec.sqrt_endpoints:
        m, r = 0.5 * (a + b), 0.5 * (b - a)

        def F(theta):
            dl = 2.0 * r * np.sin(0.5 * theta + 0.25 * math.pi) ** 2
            dr = 2.0 * r * np.sin(0.25 * math.pi - 0.5 * theta) ** 2
            x = np.where(theta < 0, a + dl, b - dr)
            return r * np.cos(theta) * _call(fn, x, dl, dr, distances)

        return _adaptive_gl(F, -0.5 * math.pi, 0.5 * math.pi, spec)

    def G(x):
        return _call(fn, x, x - a, b - x, distances)

    return _adaptive_gl(G, a, b, spec)


# ---------------------------------------------------------------------------
# Charts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OvalChart:
    """x = tau, y = base(tau) +/- amp(tau) sqrt(g(tau)) on [tau1, tau2].

    ``radicand(tau, dl, dr)`` receives the distances to both turning points.
    ``orientation`` is the direction of the flow on the oval.
    """

    entry_id: str
    tau1: float
    tau2: float
    base: Callable
    amp: Callable
    radicand: Callable
    P: Callable
    orientation: str
    reduced: Optional[Callable] = None  # w = -3 integrand in (tau, dl, dr)

    def branch(self, tau, sign: int, dl=None, dr=None):
        tau = np.asarray(tau, dtype=float)
        if dl is None:
            dl, dr = tau - self.tau1, self.tau2 - tau
        g = np.maximum(self.radicand(tau, dl, dr), 0.0)
        return self.base(tau) + sign * self.amp(tau) * np.sqrt(g)

    def point(self, tau, sign: int):
        return float(tau), float(self.branch(tau, sign))

    def endpoint(self, i: int):
        tau = self.tau1 if i == 0 else self.tau2
        return float(tau), float(self.base(np.float64(tau)))

    def P_along(self, tau, sign: int, dl=None, dr=None):
        return self.P(np.asarray(tau, dtype=float), self.branch(tau, sign, dl, dr))

    def samples(self, n: int = 1000) -> np.ndarray:
        """Points spread over both branches (sine-spaced, endpoints excluded)."""
        th = np.linspace(-0.5 * math.pi, 0.5 * math.pi, n // 2 + 2)[1:-1]
        m, r = 0.5 * (self.tau1 + self.tau2), 0.5 * (self.tau2 - self.tau1)
        tau = m + r * np.sin(th)
        return np.concatenate([np.column_stack([tau, self.branch(tau, s)]) for s in (1, -1)])


def _orientation(P, tau1, tau2, base, amp, radicand) -> str:
    tau = 0.5 * (tau1 + tau2)
    g = radicand(tau, tau - tau1, tau2 - tau)
    ys = [base(tau) + s * amp(tau) * math.sqrt(g) for s in (1, -1)]
    upper = max(ys)
    return "clockwise" if P(tau, upper) > 0 else "counterclockwise"


def oval_endpoints(entry, param=None) -> Tuple[float, float]:
    """Turning points (tau1, tau2) of the oval chart."""
    chart = oval_chart(entry) if param is None else oval_chart(_with_param(entry, param))
    if chart is None:
        raise PreconditionError(f"{entry.id}: no explicit chart of the oval")
    return chart.tau1, chart.tau2


def _with_param(entry, param):
    from .systems import catalog_instantiate

    return catalog_instantiate(entry.id, {entry.family_param: param})


def _sqrt_exact(v) -> float:
    return math.sqrt(float(v))


def _ch1_roots(a: float) -> Tuple[float, float, float]:
    """Roots tau1 < tau2 < tau3 of 4a tau^2 (1 - tau) + (tau + 1)^2 for a < 0."""
    g = lambda t: 4 * a * t * t * (1 - t) + (t + 1) ** 2
    mid = -(3 + math.sqrt(17)) / 2
    if not g(mid) > 0:
        raise DomainError(f"a = {a}: radicand not positive at -(3+sqrt 17)/2; bracket fails")
    lo = 2 * mid
    while g(lo) > 0:
        lo *= 2
        if lo < -1e12:
            raise DomainError(f"a = {a}: could not bracket the smallest turning point")
    t1 = brentq(g, lo, mid, xtol=1e-15, rtol=1e-15, maxiter=500)
    t2 = brentq(g, mid, -1.0, xtol=1e-15, rtol=1e-15, maxiter=500)
    t3 = (4 * a + 1) / (4 * a) - t1 - t2
    return t1, t2, t3


def oval_chart(entry) -> Optional[OvalChart]:
    """The explicit chart of a catalog entry's oval, or None."""
    eid = entry.id
    fld = entry.vector_field()
    P = fld.P
    one = lambda t: 1.0 + 0.0 * t
    zero = lambda t: 0.0 * t

    if eid == "chlls":
        a_ex = entry.exact_param
        a = float(a_ex)
        s = _sqrt_exact(1 - 4 * a_ex)
        t1 = 2 / (1 + s)  # = (1 - s)/(2a), written without cancellation
        t2 = (1 + s) / (2 * a)
        rad = lambda t, dl, dr: a * t * dl * dr
        base = lambda t: -0.5 / t
        amp = lambda t: 1.0 / t
        red = lambda t, dl, dr: 8 * np.sqrt(np.maximum(rad(t, dl, dr), 0.0)) / (t * (1 + 8 * t + a * t * t))
        return OvalChart(eid, t1, t2, base, amp, rad, P, _orientation(P, t1, t2, base, amp, rad), red)

    if eid == "fil_transformed":
        c_ex = entry.exact_param
        c = float(c_ex)
        q = _sqrt_exact(1 - 4 * c_ex * c_ex)
        t1 = 2 * c / (1 + q)
        t2 = (1 + q) / (2 * c)
        sig = math.sqrt(1 + 2 * c)
        rad = lambda t, dl, dr: c * t * dl * dr
        red = lambda t, dl, dr: 8 * sig * np.sqrt(np.maximum(rad(t, dl, dr), 0.0)) / (
            (t + 1) * (c * t * t + (17 * c + 8) * t + 4 + 8 * c))
        return OvalChart(eid, t1, t2, zero, one, rad, P, _orientation(P, t1, t2, zero, one, rad), red)

    if eid == "ch1_transformed":
        a = entry.param_value
        t1, t2, t3 = _ch1_roots(a)
        rad = lambda t, dl, dr: -4 * a * dl * dr * (t3 - t)
        red = lambda t, dl, dr: 2 * np.sqrt(np.maximum(rad(t, dl, dr), 0.0)) / ((t - 1) * t * (a * t + 2))
        return OvalChart(eid, t1, t2, zero, one, rad, P, _orientation(P, t1, t2, zero, one, rad), red)

    if eid == "chin2":
        rad = lambda t, dl, dr: dl * dr
        return OvalChart(eid, -1.0, 1.0, zero, one, rad, P, _orientation(P, -1.0, 1.0, zero, one, rad))

    if eid == "yablonskii":
        a, b, c = (float(entry.params[k]) for k in ("a", "b", "c"))
        t1, t2 = min(a, b), max(a, b)
        rad = lambda t, dl, dr: dl * dr
        base = lambda t: -c * t * t
        amp = lambda t: np.abs(t)
        return OvalChart(eid, t1, t2, base, amp, rad, P, _orientation(P, t1, t2, base, amp, rad))

    if eid == "nalc":
        n = int(entry.params["n"])
        t1 = 2 * math.pi * n - 0.5 * math.pi
        t2 = 2 * math.pi * n + 0.5 * math.pi
        # cos(tau) = sin(tau - tau1) = sin(tau2 - tau), evaluated from the nearer end
        rad = lambda t, dl, dr: np.where(dl < dr, np.sin(dl), np.sin(dr))
        return OvalChart(eid, t1, t2, zero, one, rad, P, _orientation(P, t1, t2, zero, one, rad))

    return None


# ---------------------------------------------------------------------------
# Hyperbolicity integrals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HyperbolicityResult:
    """D = int_0^T div dt for the entry's own system, by one method.

    ``D_original`` is the value for the untransformed source system (equal to
    D unless the time factor reverses the flow).
    """

    entry_id: str
    param: Optional[float]
    D: float
    D_original: float
    method: str
    error: float = 0.0
    w: Optional[int] = None
    near_boundary: bool = False

    @property
    def stability(self) -> str:
        return _verdict(self.D)

    @property
    def stability_original(self) -> str:
        return _verdict(self.D_original)


def _verdict(D: float, zero_tol: float = 1e-8) -> str:
    if abs(D) <= zero_tol:
        return "non-hyperbolic"
    return "stable" if D < 0 else "unstable"


def _near_boundary(entry) -> bool:
    v = entry.param_value
    bounds = {
        "chlls": (0.0, 0.25),
        "filipstov": (0.0, 3 / 13),
        "fil_transformed": (0.0, 0.5),
        "chavarriga": ((-71 + 17 * math.sqrt(17)) / 32, 0.0),
        "ch1_transformed": ((-71 + 17 * math.sqrt(17)) / 32, 0.0),
    }.get(entry.id)
    if bounds is None or v is None:
        return False
    return min(abs(v - bounds[0]), abs(v - bounds[1])) < 1e-3


def reduced_integrand(entry) -> Callable:
    """The w = -3 reduced integrand tau -> value, vectorized."""
    chart = entry.oval_chart
    if chart is None or chart.reduced is None:
        raise PreconditionError(f"{entry.id}: no reduced integrand")
    return lambda t: chart.reduced(t, t - chart.tau1, chart.tau2 - t)


def _resolve(entry, param):
    return entry if param is None else _with_param(entry, param)


def reduced_hyperbolicity_integral(entry, param=None, spec: Optional[QuadratureSpec] = None) -> HyperbolicityResult:
    """D from the reduced (w = -3) integrand, strictly positive on each family.

    For the two untransformed degree-4 systems the value is taken from their
    transformed form: the integral does not change under the change of
    variables, and changes sign when the time factor reverses the flow.
    """
    entry = _resolve(entry, param)
    if entry.id in ("filipstov", "chavarriga"):
        target = "fil_transformed" if entry.id == "filipstov" else "ch1_transformed"
        from .systems import catalog_instantiate

        tparam = {"c": entry.params_c()} if entry.id == "filipstov" else {"a": entry.params["a"]}
        t = reduced_hyperbolicity_integral(catalog_instantiate(target, tparam), spec=spec)
        return HyperbolicityResult(entry.id, entry.param_value, t.D_original, t.D_original, t.method, t.error, t.w,
                                   t.near_boundary)
    chart = entry.oval_chart
    if chart is None or chart.reduced is None:
        raise PreconditionError(f"{entry.id}: no reduced integrand (only the chlls, Filipstov and Chavarriga families)")
    val, err = quadrature(chart.reduced, chart.tau1, chart.tau2, spec, distances=True)
    D_orig = val * entry.time_orientation
    return HyperbolicityResult(entry.id, entry.param_value, val, D_orig, "reduced_quadrature", err, REDUCED_W,
                               _near_boundary(entry))


def raw_integrand(chart: OvalChart, g: Callable) -> Callable:
    """(tau, dl, dr) -> [g/|P|](tau, y_+) + [g/|P|](tau, y_-)."""

    def h(t, dl, dr):
        out = 0.0
        for s in (1, -1):
            y = chart.branch(t, s, dl, dr)
            out = out + g(t, y) / np.abs(chart.P(t, y))
        return out

    return h


def raw_divergence_integral(entry, param=None, g: Optional[Callable] = None,
                            spec: Optional[QuadratureSpec] = None) -> Tuple[float, float]:
    """int_0^T g dt over the cycle as a two-branch tau-integral; g defaults to div.

    Returns (value, error estimate).  g = 1 gives the period.
    """
    entry = _resolve(entry, param)
    chart = entry.oval_chart
    if chart is None:
        raise PreconditionError(f"{entry.id}: no explicit chart of the oval")
    if g is None:
        g = entry.vector_field().divergence
    return quadrature(raw_integrand(chart, g), chart.tau1, chart.tau2, spec, distances=True)


def chin_closed_form(a, b, c) -> float:
    """int div over the unit-circle cycle of the Chin family.

    With rho^2 = a^2 + b^2 the value is
    sign(c) (4 pi a / rho^2) (|c| / sqrt(c^2 - rho^2) - 1).
    """
    a, b, c = float(a), float(b), float(c)
    rho2 = a * a + b * b
    return math.copysign(1.0, c) * 4 * math.pi * a / rho2 * (abs(c) / math.sqrt(c * c - rho2) - 1)


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


ALL_METHODS = ("ode", "reduced", "raw", "closed")


@dataclass
class HyperbolicityReport:
    entry_id: str
    params: Dict[str, str]
    results: Dict[str, HyperbolicityResult]
    expected: Optional[str]
    rel_tol: float = 1e-5
    closed_rel_tol: float = 1e-8
    notes: List[str] = field(default_factory=list)

    def disagreements(self) -> List[str]:
        out = []
        items = list(self.results.items())
        for i, (m1, r1) in enumerate(items):
            for m2, r2 in items[i + 1:]:
                tol = self.closed_rel_tol if "closed" in (m1, m2) and "ode" not in (m1, m2) else self.rel_tol
                scale = max(abs(r1.D), abs(r2.D))
                if scale > 1e-8 and abs(r1.D - r2.D) > tol * scale:
                    out.append(f"{m1} vs {m2}: {r1.D:.17g} vs {r2.D:.17g}")
                elif scale <= 1e-8 and abs(r1.D - r2.D) > 1e-6:
                    out.append(f"{m1} vs {m2}: {r1.D:.3e} vs {r2.D:.3e}")
        return out

    @property
    def agree(self) -> bool:
        return not self.disagreements()

    @property
    def D_original(self) -> float:
        return next(iter(self.results.values())).D_original

    @property
    def verdict(self) -> str:
        D = self.D_original
        if self.expected == "center_band" and abs(D) <= 1e-6:
            return "center_band"
        return _verdict(D)

    @property
    def matches_expected(self) -> Optional[bool]:
        if self.expected is None:
            return None
        return self.verdict == self.expected

    def to_dict(self) -> dict:
        return {
            "system": self.entry_id,
            "params": self.params,
            "methods": {m: {"D": r.D, "D_original": r.D_original, "error": r.error} for m, r in self.results.items()},
            "agree": self.agree,
            "verdict": self.verdict,
            "expected": self.expected,
            "notes": self.notes,
        }


def _ode_result(entry) -> HyperbolicityResult:
    from .flow import find_periodic_orbit

    orbit = find_periodic_orbit(entry.vector_field(), entry.oval_point(), curve=entry.curve_functions())
    err = abs(orbit.I_div - orbit.I_k)
    return HyperbolicityResult(entry.id, entry.param_value, orbit.I_div, orbit.I_div * entry.time_orientation, "ode",
                               err, None, _near_boundary(entry))


def _closed_result(entry) -> Optional[HyperbolicityResult]:
    if entry.id == "chlls":
        from .elliptic import D_closed_form

        D = D_closed_form(entry.exact_param)
        return HyperbolicityResult(entry.id, entry.param_value, D, D, "closed_form", 0.0, None, _near_boundary(entry))
    if entry.id == "chin2":
        D = chin_closed_form(entry.params["a"], entry.params["b"], entry.params["c"])
        return HyperbolicityResult(entry.id, None, D, D, "closed_form")
    return None


def hyperbolicity(entry, methods: Sequence[str] = ALL_METHODS, rel_tol: float = 1e-5) -> HyperbolicityReport:
    """Compute D by every requested method that applies to the entry."""
    results: Dict[str, HyperbolicityResult] = {}
    notes = []
    for m in methods:
        if m not in ALL_METHODS:
            raise PreconditionError(f"unknown method {m!r}; choose from {', '.join(ALL_METHODS)}")
        if m == "ode":
            results[m] = _ode_result(entry)
        elif m == "reduced":
            try:
                results[m] = reduced_hyperbolicity_integral(entry)
            except PreconditionError as exc:
                notes.append(f"reduced: {exc}")
        elif m == "raw":
            if entry.oval_chart is None:
                notes.append(f"raw: {entry.id} has no explicit chart")
                continue
            val, err = raw_divergence_integral(entry)
            results[m] = HyperbolicityResult(entry.id, entry.param_value, val, val * entry.time_orientation,
                                             "raw_quadrature", err, None, _near_boundary(entry))
        elif m == "closed":
            r = _closed_result(entry)
            if r is None:
                notes.append(f"closed: no closed form for {entry.id}")
            else:
                results[m] = r
    if not results:
        raise PreconditionError(f"{entry.id}: none of the methods {list(methods)} applies")
    expected = entry.expected_stability
    if entry.source_id is not None:
        # the verdict refers to the untransformed system
        expected = _SOURCE_EXPECTED[entry.source_id]
    return HyperbolicityReport(entry.id, {k: str(v) for k, v in entry.params.items()}, results,
                               expected, rel_tol, notes=notes)


_SOURCE_EXPECTED = {"filipstov": "unstable", "chavarriga": "stable"}


def sweep(entry_id: str, values: Iterable, methods: Sequence[str] = ("ode", "reduced", "raw", "closed")):
    """One HyperbolicityReport (or the raised error) per parameter value, in input order."""
    from .systems import catalog_instantiate, _PARAMS

    name = _PARAMS[entry_id][0]
    rows = []
    for v in values:
        try:
            rows.append((v, hyperbolicity(catalog_instantiate(entry_id, {name: v}), methods)))
        except AlgCycleError as exc:
            rows.append((v, exc))
    return rows


SWEEP_COLUMNS = ("param", "D_reduced", "D_raw", "D_ode", "D_closed", "err_reduced", "err_raw", "err_ode", "agree",
                 "verdict", "status")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def sweep_csv(rows, out=None) -> str:
    """Sweep rows as CSV with 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for v, rep in rows:
        if isinstance(rep, Exception):
            w.writerow([_fmt(v)] + [""] * 9 + [f"error: {type(rep).__name__}: {rep}"])
            continue
        r = rep.results
        get = lambda m, attr: getattr(r[m], attr) if m in r else None
        w.writerow([
            _fmt(v), _fmt(get("reduced", "D")), _fmt(get("raw", "D")), _fmt(get("ode", "D")), _fmt(get("closed", "D")),
            _fmt(get("reduced", "error")), _fmt(get("raw", "error")), _fmt(get("ode", "error")),
            "true" if rep.agree else "false", rep.verdict, "ok" if rep.agree else "disagree",
        ])
    text = buf.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            with open(out, "w", newline="") as fh:
                fh.write(text)
    return text
