"""Flow integration, return maps and monodromy for planar vector fields.

The integrator is scipy's DOP853 (an explicit Runge-Kutta pair of order
8(5,3) with dense output), driven step by step so that section crossings
can be localized on the dense interpolant of each step.  Orbit integrals
of div and k ride in the state vector and inherit the adaptive error
control of the flow itself.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import DOP853, OdeSolution, solve_ivp
from scipy.optimize import brentq

from .errors import ConvergenceError, IntegrationError, NoOrbitError, PreconditionError
from .systems import CurveFunctions, VectorField

__all__ = [
    "RTOL",
    "ATOL",
    "SectionSpec",
    "OrbitTrace",
    "Monodromy",
    "integrate_flow",
    "find_periodic_orbit",
    "orbit_integral",
    "theorem_residual",
    "monodromy_matrix",
    "propagation_residual",
    "rotation_field",
]

RTOL = 1e-11
ATOL = 1e-13
BLOWUP = 1e8


def rotation_field() -> VectorField:
    """x' = -y, y' = x."""
    zero = lambda x, y: 0.0 * x
    return VectorField(
        lambda x, y: -y + 0.0 * x,
        lambda x, y: x + 0.0 * y,
        zero,
        lambda x, y: -1.0 + 0.0 * x,
        lambda x, y: 1.0 + 0.0 * x,
        zero,
    )


def _augmented_rhs(field_: VectorField, curve: Optional[CurveFunctions]):
    P, Q, div = field_.P, field_.Q, field_.divergence
    k = curve.k if curve is not None else None

    def rhs(t, z):
        x, y = z[0], z[1]
        return [P(x, y), Q(x, y), div(x, y), k(x, y) if k is not None else 0.0]

    return rhs


@dataclass(frozen=True)
class SectionSpec:
    """Line through ``anchor`` with normal ``normal``: {q : (q - anchor) . normal = 0}.

    Points of the section are ``anchor + s * direction`` where ``direction``
    is the normal rotated by 90 degrees.
    """

    anchor: Tuple[float, float]
    normal: Tuple[float, float]
    half_width: float = math.inf

    def __post_init__(self):
        n = math.hypot(*self.normal)
        if not n > 0:
            raise PreconditionError("section normal must be non-null")

    @classmethod
    def transverse(cls, field_: VectorField, p0, half_width: float = math.inf) -> "SectionSpec":
        """Section through p0 orthogonal to the flow, as in {(q - p0) . F(p0) = 0}."""
        F = np.array(field_(*p0), dtype=float)
        n = np.hypot(*F)
        if n == 0:
            raise PreconditionError(f"{tuple(p0)} is a singular point of the field")
        return cls((float(p0[0]), float(p0[1])), (F[0] / n, F[1] / n), half_width)

    @property
    def direction(self) -> np.ndarray:
        n = np.array(self.normal, dtype=float) / math.hypot(*self.normal)
        return np.array([-n[1], n[0]])

    def g(self, x, y) -> float:
        return (x - self.anchor[0]) * self.normal[0] + (y - self.anchor[1]) * self.normal[1]

    def point(self, s: float) -> np.ndarray:
        return np.array(self.anchor, dtype=float) + s * self.direction

    def coordinate(self, q) -> float:
        return float(np.dot(np.asarray(q, dtype=float) - np.array(self.anchor), self.direction))


@dataclass
class OrbitTrace:
    """A closed orbit: start point, period, dense solution of (x, y, int div, int k)."""

    p0: Tuple[float, float]
    T: float
    solution: Callable  # t -> state array (4,)
    t_steps: np.ndarray
    I_div: float
    I_k: float
    closure: float
    orientation: str
    f_drift: float = float("nan")
    f_drift_rel: float = float("nan")
    vector_field: Optional[VectorField] = field(default=None, repr=False)
    curve: Optional[CurveFunctions] = field(default=None, repr=False)
    return_iterations: int = 0

    def points(self, n: int = 2000) -> np.ndarray:
        t = np.linspace(0.0, self.T, n)
        return self.solution(t)[:2].T

    def rows(self, n: Optional[int] = None):
        """(t, x, y, f, int div, int k) at the solver steps, or n uniform times."""
        t = self.t_steps if n is None else np.linspace(0.0, self.T, n)
        z = self.solution(t)
        f = self.curve.f(z[0], z[1]) + 0.0 * t if self.curve is not None else np.full_like(t, np.nan)
        return np.column_stack([t, z[0], z[1], f, z[2], z[3]])

    def to_csv(self, out=None, n: Optional[int] = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x", "y", "f", "int_div", "int_k"])
        for row in self.rows(n):
            w.writerow([f"{v:.17g}" for v in row])
        text = buf.getvalue()
        if out is not None:
            if hasattr(out, "write"):
                out.write(text)
            else:
                with open(out, "w", newline="") as fh:
                    fh.write(text)
        return text


@dataclass(frozen=True)
class Monodromy:
    """M = DPhi_T(p0) with the orbit integrals that accompany it."""

    M: np.ndarray
    I_div: float
    I_k: float
    p0: Tuple[float, float]
    F0: np.ndarray
    T: float

    def liouville_residual(self) -> float:
        """|det M - exp(I_div)| / exp(I_div)."""
        e = math.exp(self.I_div)
        return abs(np.linalg.det(self.M) - e) / e

    def flow_eigen_residual(self) -> float:
        """||M F(p0) - F(p0)|| / ||F(p0)||."""
        return float(np.linalg.norm(self.M @ self.F0 - self.F0) / np.linalg.norm(self.F0))

    def left_eigen_residual(self, grad_f) -> float:
        """||grad f(p0) M - exp(I_k) grad f(p0)|| / ||grad f(p0)||."""
        g = np.asarray(grad_f, dtype=float)
        return float(np.linalg.norm(g @ self.M - math.exp(self.I_k) * g) / np.linalg.norm(g))

    def nontrivial_multiplier(self) -> float:
        """The eigenvalue other than 1, det M (equal to exp(I_div) by Liouville)."""
        return float(np.linalg.det(self.M))


def _shoelace(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _step_solver(rhs, z0, t_max, rtol, atol):
    solver = DOP853(rhs, 0.0, np.asarray(z0, dtype=float), t_max, rtol=rtol, atol=atol)
    return solver


def _advance(solver):
    msg = solver.step()
    if solver.status == "failed" or msg is not None:
        raise IntegrationError(f"integration failed at t = {solver.t:.6g}: {msg}", solver.t, tuple(solver.y[:2]))
    if not np.all(np.isfinite(solver.y)) or np.max(np.abs(solver.y[:2])) > BLOWUP:
        raise IntegrationError(f"solution left every bounded region at t = {solver.t:.6g}", solver.t, tuple(solver.y[:2]))


def integrate_flow(
    field_: VectorField,
    p0,
    t_end: float,
    rtol: float = RTOL,
    atol: float = ATOL,
    curve: Optional[CurveFunctions] = None,
):
    """Integrate (x, y, int div, int k) from p0 over [0, t_end] with dense output.

    Returns scipy's OdeResult; ``sol`` is the dense interpolant.
    """
    if not (rtol > 0 and atol > 0):
        raise PreconditionError("tolerances must be positive")
    rhs = _augmented_rhs(field_, curve)

    def blowup(t, z):
        return BLOWUP - max(abs(z[0]), abs(z[1]))

    blowup.terminal = True
    res = solve_ivp(rhs, (0.0, t_end), [p0[0], p0[1], 0.0, 0.0], method="DOP853",
                    rtol=rtol, atol=atol, dense_output=True, events=blowup)
    if res.status != 0:
        t = float(res.t[-1])
        raise IntegrationError(f"integration stopped at t = {t:.6g}: {res.message}", t, tuple(res.y[:2, -1]))
    return res


def _first_return(rhs, q, section: SectionSpec, t_max, rtol, atol):
    """Integrate from q until the first same-direction crossing of the section.

    Returns (T, state at T, OdeSolution on [0, T], step times).
    """
    solver = _step_solver(rhs, [q[0], q[1], 0.0, 0.0], t_max, rtol, atol)
    ts, interps = [0.0], []
    left = False
    g_old = section.g(q[0], q[1])
    while True:
        if solver.status == "finished":
            raise NoOrbitError(f"no return to the section within t = {t_max:g}")
        t_old = solver.t
        _advance(solver)
        dense = solver.dense_output()
        ts.append(solver.t)
        interps.append(dense)
        g_new = section.g(solver.y[0], solver.y[1])
        if not left:
            left = g_new < 0
            g_old = g_new
            continue
        if g_old < 0 <= g_new:
            T = brentq(lambda t: section.g(*dense(t)[:2]), t_old, solver.t, xtol=1e-14 * max(1.0, solver.t),
                       rtol=4 * np.finfo(float).eps, maxiter=200)
            zT = dense(T)
            sol = OdeSolution(np.array(ts), interps)
            return T, zT, sol, np.array(ts[:-1] + [T])
        g_old = g_new


def find_periodic_orbit(
    field_: VectorField,
    guess,
    section: Optional[SectionSpec] = None,
    tol: float = 1e-11,
    curve: Optional[CurveFunctions] = None,
    rtol: float = RTOL,
    atol: float = ATOL,
    t_max: float = 1e4,
    max_iter: int = 30,
) -> OrbitTrace:
    """Locate the closed orbit through the section near ``guess``.

    The displacement d(s) = sigma(s) - s of the first-return map on the
    section is driven to zero by a secant iteration.  ``tol`` is relative to
    the size of the guess.
    """
    if section is None:
        section = SectionSpec.transverse(field_, guess)
    rhs = _augmented_rhs(field_, curve)
    scale = max(1.0, float(np.hypot(*guess)))

    def displacement(s):
        q = section.point(s)
        T, zT, sol, ts = _first_return(rhs, q, section, t_max, rtol, atol)
        return section.coordinate(zT[:2]) - s, (q, T, zT, sol, ts)

    s0 = section.coordinate(guess)
    d0, run0 = displacement(s0)
    it = 0
    if abs(d0) > tol * scale:
        s1 = s0 + 1e-6 * scale
        d1, run1 = displacement(s1)
        while abs(d1) > tol * scale:
            it += 1
            if it > max_iter or d1 == d0:
                raise ConvergenceError(f"secant on the displacement did not converge (|d| = {abs(d1):.3e})",
                                       estimate=section.point(s1))
            s0, s1, d0 = s1, s1 - d1 * (s1 - s0) / (d1 - d0), d1
            if abs(s1) > section.half_width:
                raise ConvergenceError("secant iterate left the section", estimate=section.point(s1))
            d1, run1 = displacement(s1)
        run0 = run1
    q, T, zT, sol, ts = run0
    return _make_trace(q, T, zT, sol, ts, field_, curve, it)


def _make_trace(q, T, zT, sol, ts, field_, curve, iterations) -> OrbitTrace:
    pts = sol(np.linspace(0.0, T, 4001))[:2].T
    orientation = "counterclockwise" if _shoelace(pts) > 0 else "clockwise"
    trace = OrbitTrace(
        (float(q[0]), float(q[1])), float(T), sol, ts, float(zT[2]), float(zT[3]),
        float(np.hypot(zT[0] - q[0], zT[1] - q[1])), orientation, vector_field=field_, curve=curve,
        return_iterations=iterations,
    )
    if curve is not None:
        fv = np.abs(curve.f(pts[:, 0], pts[:, 1]))
        gn = np.hypot(curve.f_x(pts[:, 0], pts[:, 1]) + 0 * pts[:, 0], curve.f_y(pts[:, 0], pts[:, 1]) + 0 * pts[:, 0])
        trace.f_drift = float(np.max(fv))
        trace.f_drift_rel = float(np.max(fv / gn))
    return trace


def orbit_integral(orbit: OrbitTrace, g: Optional[Callable] = None, rtol: float = RTOL, atol: float = ATOL) -> float:
    """Integral of g along the closed orbit over one period (g = None gives T).

    The orbit is re-integrated with g appended to the state as a quadrature
    variable.
    """
    if g is None:
        return orbit.T
    P, Q = orbit.vector_field.P, orbit.vector_field.Q

    def rhs(t, z):
        return [P(z[0], z[1]), Q(z[0], z[1]), g(z[0], z[1])]

    res = solve_ivp(rhs, (0.0, orbit.T), [orbit.p0[0], orbit.p0[1], 0.0], method="DOP853", rtol=rtol, atol=atol)
    if res.status != 0:
        raise IntegrationError(f"integration failed: {res.message}", float(res.t[-1]), tuple(res.y[:2, -1]))
    return float(res.y[2, -1])


def theorem_residual(orbit: OrbitTrace, drift_tol: float = 1e-7) -> float:
    """|int div - int k| over one period; the orbit must lie on the attached curve."""
    if orbit.curve is None:
        raise PreconditionError("orbit has no invariant curve attached")
    if not orbit.f_drift_rel <= drift_tol:
        raise PreconditionError(f"orbit is off the invariant curve (|f|/|grad f| up to {orbit.f_drift_rel:.3e})")
    return abs(orbit.I_div - orbit.I_k)


def monodromy_matrix(
    field_: VectorField,
    orbit: OrbitTrace,
    curve: Optional[CurveFunctions] = None,
    rtol: float = RTOL,
    atol: float = ATOL,
) -> Monodromy:
    """Integrate the first-order variational equations over one period."""
    P, Q, J, div = field_.P, field_.Q, field_.jacobian, field_.divergence
    curve = curve if curve is not None else orbit.curve
    k = curve.k if curve is not None else (lambda x, y: 0.0)

    def rhs(t, z):
        x, y = z[0], z[1]
        A = J(x, y)
        Phi = z[2:6].reshape(2, 2)
        return np.concatenate([[P(x, y), Q(x, y)], (A @ Phi).ravel(), [div(x, y), k(x, y)]])

    z0 = np.concatenate([orbit.p0, np.eye(2).ravel(), [0.0, 0.0]])
    res = solve_ivp(rhs, (0.0, orbit.T), z0, method="DOP853", rtol=rtol, atol=atol)
    if res.status != 0:
        raise IntegrationError(f"integration failed: {res.message}", float(res.t[-1]), tuple(res.y[:2, -1]))
    zT = res.y[:, -1]
    F0 = np.array(field_(*orbit.p0), dtype=float)
    return Monodromy(zT[2:6].reshape(2, 2), float(zT[6]), float(zT[7]), orbit.p0, F0, orbit.T)


def propagation_residual(
    field_: VectorField,
    curve: CurveFunctions,
    q,
    t_end: float,
    n_samples: int = 200,
    rtol: float = RTOL,
    atol: float = ATOL,
) -> float:
    """max_t |f(Phi_t q) - f(q) exp(int_0^t k)| / (|f(q)| exp(int_0^t k)) along an arc.

    ``q`` should be off the curve (f(q) != 0).
    """
    f0 = float(curve.f(*q))
    if f0 == 0:
        raise PreconditionError("start point lies on the curve; use a point with f(q) != 0")
    res = integrate_flow(field_, q, t_end, rtol=rtol, atol=atol, curve=curve)
    t = np.linspace(0.0, t_end, n_samples)
    z = res.sol(t)
    pred = f0 * np.exp(z[3])
    return float(np.max(np.abs(curve.f(z[0], z[1]) - pred) / np.abs(pred)))
