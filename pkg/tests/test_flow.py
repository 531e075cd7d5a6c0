"""Integration, return maps, orbit integrals and monodromy."""

import io
import math
from fractions import Fraction

import numpy as np
import pytest

from algcycle.errors import ConvergenceError, NoOrbitError, PreconditionError
from algcycle.flow import (
    SectionSpec,
    find_periodic_orbit,
    integrate_flow,
    monodromy_matrix,
    orbit_integral,
    propagation_residual,
    rotation_field,
    theorem_residual,
)
from algcycle.systems import VectorField, catalog_instantiate


@pytest.fixture(scope="module")
def nalc():
    return catalog_instantiate("nalc", {"n": 0})


@pytest.fixture(scope="module")
def gamma0(nalc):
    return find_periodic_orbit(nalc.vector_field(), (0.0, 1.0), curve=nalc.curve_functions())


@pytest.fixture(scope="module")
def gamma1():
    e = catalog_instantiate("nalc", {"n": 1})
    return find_periodic_orbit(e.vector_field(), (2 * math.pi, 1.0), curve=e.curve_functions())


@pytest.fixture(scope="module")
def chlls():
    return catalog_instantiate("chlls", {"a": Fraction(1, 8)})


@pytest.fixture(scope="module")
def chlls_orbit(chlls):
    return find_periodic_orbit(chlls.vector_field(), chlls.oval_point(), curve=chlls.curve_functions())


def test_rotation_returns_home():
    res = integrate_flow(rotation_field(), (1.0, 0.0), 2 * math.pi)
    assert np.hypot(res.y[0, -1] - 1.0, res.y[1, -1]) <= 1e-10


def test_rotation_period_and_monodromy():
    F = rotation_field()
    orbit = find_periodic_orbit(F, (1.0, 0.0))
    assert orbit.T == pytest.approx(2 * math.pi, abs=1e-9)
    assert orbit.orientation == "counterclockwise"
    M = monodromy_matrix(F, orbit)
    assert np.allclose(M.M, np.eye(2), atol=1e-9)
    assert orbit_integral(orbit) == orbit.T
    assert orbit_integral(orbit, lambda x, y: 1.0) == pytest.approx(orbit.T, rel=1e-10)


def test_nalc_drift_one_revolution(nalc, gamma0):
    cf = nalc.curve_functions()
    res = integrate_flow(nalc.vector_field(), (0.0, 1.0), gamma0.T, rtol=1e-11, curve=cf)
    t = np.linspace(0, gamma0.T, 2000)
    z = res.sol(t)
    assert np.max(np.abs(cf.f(z[0], z[1]))) <= 1e-9


def test_nalc_gamma0(gamma0):
    assert gamma0.closure <= 1e-9
    assert gamma0.I_div == pytest.approx(-4 * math.pi, abs=1e-6)
    assert theorem_residual(gamma0) <= 1e-6
    assert gamma0.I_k == pytest.approx(-4 * math.pi, abs=1e-6)
    assert orbit_integral(gamma0, lambda x, y: -4 * y * y + 2 * np.cos(x) - x * np.sin(x)) == pytest.approx(
        -4 * math.pi, abs=1e-6)


def test_nalc_gamma1(gamma1):
    assert abs(gamma1.I_div) <= 1e-6
    assert abs(gamma1.I_k) <= 1e-6
    assert theorem_residual(gamma1) <= 1e-6


def test_chlls_orbit_on_curve_from_turning_point():
    e = catalog_instantiate("chlls", {"a": Fraction(3, 16)})
    cf = e.curve_functions()
    p0 = (4 / 3, -3 / 8)
    assert abs(cf.f(*p0)) <= 1e-14
    orbit = find_periodic_orbit(e.vector_field(), p0, curve=cf)
    assert orbit.f_drift <= 1e-9
    assert orbit.T > 0 and orbit.closure <= 1e-9


def test_chlls_orbit(chlls, chlls_orbit):
    assert chlls_orbit.closure <= 1e-9
    assert chlls_orbit.orientation == "clockwise"
    assert theorem_residual(chlls_orbit) <= 1e-6
    assert chlls_orbit.I_div > 0  # unstable


def test_chlls_period_against_long_integration(chlls, chlls_orbit):
    # oracle: a long tight integration returns to the start after exactly ten periods
    res = integrate_flow(chlls.vector_field(), chlls_orbit.p0, 10 * chlls_orbit.T, rtol=1e-12, atol=1e-14)
    assert np.hypot(res.y[0, -1] - chlls_orbit.p0[0], res.y[1, -1] - chlls_orbit.p0[1]) <= 1e-7


def test_chlls_monodromy(chlls, chlls_orbit):
    M = monodromy_matrix(chlls.vector_field(), chlls_orbit)
    assert M.liouville_residual() <= 1e-6
    assert M.flow_eigen_residual() <= 1e-5
    assert M.left_eigen_residual(chlls.curve_functions().gradient(*chlls_orbit.p0)) <= 1e-5
    assert M.nontrivial_multiplier() > 1


def test_nalc_monodromy(nalc, gamma0):
    M = monodromy_matrix(nalc.vector_field(), gamma0)
    assert M.liouville_residual() <= 1e-6
    assert M.flow_eigen_residual() <= 1e-5
    assert M.left_eigen_residual(nalc.curve_functions().gradient(*gamma0.p0)) <= 1e-5
    assert M.nontrivial_multiplier() == pytest.approx(math.exp(-4 * math.pi), rel=1e-6)


def test_propagation_off_curve(chlls, chlls_orbit):
    F, cf = chlls.vector_field(), chlls.curve_functions()
    for dx in (0.05, -0.05, 0.1):
        q = np.array(chlls_orbit.p0) + np.array([dx, 0.0])
        assert propagation_residual(F, cf, q, 0.5 * chlls_orbit.T) <= 1e-8
    # closer to the curve f(q) is small, so the integrator tolerance must shrink with it
    q = np.array(chlls_orbit.p0) + np.array([0.01, 0.0])
    assert propagation_residual(F, cf, q, 0.5 * chlls_orbit.T, rtol=1e-13, atol=1e-15) <= 1e-8
    with pytest.raises(PreconditionError):
        propagation_residual(chlls.vector_field(), rotation_curve(), (1.0, 0.0), 1.0)


def rotation_curve():
    from algcycle.systems import CurveFunctions

    return CurveFunctions(lambda x, y: x * x + y * y - 1, lambda x, y: 2 * x, lambda x, y: 2 * y,
                          lambda x, y: 0.0 * x)


def test_theorem_residual_requires_curve(chlls, chlls_orbit):
    bare = find_periodic_orbit(rotation_field(), (1.0, 0.0))
    with pytest.raises(PreconditionError):
        theorem_residual(bare)
    # a circle of the wrong radius is not an orbit of the rotation on f = x^2 + y^2 - 1
    off = find_periodic_orbit(rotation_field(), (2.0, 0.0), curve=rotation_curve())
    with pytest.raises(PreconditionError):
        theorem_residual(off)


def test_csv_export(chlls_orbit):
    text = chlls_orbit.to_csv(n=11)
    lines = text.splitlines()
    assert lines[0] == "t,x,y,f,int_div,int_k"
    assert len(lines) == 12
    last = [float(v) for v in lines[-1].split(",")]
    assert last[0] == pytest.approx(chlls_orbit.T, rel=1e-15)
    assert last[4] == pytest.approx(chlls_orbit.I_div, rel=1e-9)
    buf = io.StringIO()
    assert chlls_orbit.to_csv(buf, n=11) == text == buf.getvalue()


def test_no_return_raises():
    shift = VectorField(lambda x, y: 1.0 + 0 * x, lambda x, y: 0.0 * x, lambda x, y: 0.0, lambda x, y: 0.0,
                        lambda x, y: 0.0, lambda x, y: 0.0)
    with pytest.raises(NoOrbitError):
        find_periodic_orbit(shift, (0.0, 0.0), t_max=10.0)


def test_secant_iteration_cap(chlls):
    guess = np.array(chlls.oval_point()) + np.array([0.2, 0.0])
    with pytest.raises(ConvergenceError):
        find_periodic_orbit(chlls.vector_field(), tuple(guess), max_iter=0)


def test_section_validation():
    with pytest.raises(PreconditionError):
        SectionSpec((0.0, 0.0), (0.0, 0.0))
    with pytest.raises(PreconditionError):
        SectionSpec.transverse(rotation_field(), (0.0, 0.0))
    s = SectionSpec((1.0, 0.0), (0.0, 1.0))
    assert s.coordinate(s.point(0.25)) == pytest.approx(0.25)
