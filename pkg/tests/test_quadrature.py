"""Adaptive quadrature rules."""

import math

import numpy as np
import pytest

from algcycle.errors import ConvergenceError, PreconditionError
from algcycle.ovalquad import QuadratureSpec, quadrature

GL = QuadratureSpec()
GL_PLAIN = QuadratureSpec(sqrt_endpoints=False)
TS = QuadratureSpec(method="tanh_sinh")


@pytest.mark.parametrize("spec", [GL, GL_PLAIN, TS])
def test_constant(spec):
    val, err = quadrature(lambda t: np.ones_like(t), 0.0, 1.0, spec)
    assert val == pytest.approx(1.0, abs=1e-14)
    assert err >= 0


@pytest.mark.parametrize("spec", [GL, TS])
def test_semicircle(spec):
    val, err = quadrature(lambda t: np.sqrt(np.maximum(1 - t * t, 0)), -1.0, 1.0, spec)
    assert abs(val - math.pi / 2) <= 1e-12


def test_semicircle_with_distances():
    val, _ = quadrature(lambda t, dl, dr: np.sqrt(dl * dr), -1.0, 1.0, distances=True)
    assert abs(val - math.pi / 2) <= 1e-14


def test_inverse_sqrt_tanh_sinh():
    val, err = quadrature(lambda t, dl, dr: 1 / np.sqrt(dl), 0.0, 1.0, TS, distances=True)
    assert abs(val - 2.0) <= 1e-10


def test_inverse_sqrt_both_ends_sine_substitution():
    # 1/sqrt((t - a)(b - t)) integrates to pi on any interval
    val, _ = quadrature(lambda t, dl, dr: 1 / np.sqrt(dl * dr), 2.0, 7.0, distances=True)
    assert abs(val - math.pi) <= 1e-13


def test_smooth_polynomial_exact():
    val, _ = quadrature(lambda t: 5 * t**4 - 3 * t**2, -2.0, 3.0, GL_PLAIN)
    assert val == pytest.approx((3.0**5 - 3.0**3) - ((-2.0) ** 5 - (-2.0) ** 3), rel=1e-14)


def test_error_estimate_tracks_error():
    val, err = quadrature(lambda t: np.exp(np.sin(3 * t)), 0.0, 5.0, GL_PLAIN)
    import mpmath

    with mpmath.workdps(30):
        ref = float(mpmath.quad(lambda t: mpmath.exp(mpmath.sin(3 * t)), [0, 1, 2, 3, 4, 5]))
    assert abs(val - ref) <= max(err, 1e-13 * abs(ref)) * 10


def test_bad_interval_and_spec():
    with pytest.raises(PreconditionError):
        quadrature(lambda t: t, 1.0, 0.0)
    with pytest.raises(PreconditionError):
        QuadratureSpec(method="simpson")
    with pytest.raises(PreconditionError):
        QuadratureSpec(abs_tol=0.0)


def test_nonconvergence_reported():
    spec = QuadratureSpec(sqrt_endpoints=False, max_level=2)
    with pytest.raises(ConvergenceError) as info:
        quadrature(lambda t: np.sin(1 / t), 1e-6, 1.0, spec)
    assert info.value.estimate is not None
