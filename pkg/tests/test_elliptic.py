"""Complete elliptic integrals, derivative formulas, identities and the Fuchs equation."""

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy import special

from algcycle.elliptic import (
    D_BOUNDARY,
    D_closed_form,
    carlson_rc,
    carlson_rd,
    carlson_rf,
    carlson_rj,
    elliptic_derivatives,
    elliptic_E,
    elliptic_K,
    elliptic_Pi,
    fuchs_residual,
    identity_relch2,
    identity_relfil,
    relch2_derivative_residual,
    relch2_params,
    relfil_params,
)
from algcycle.errors import DomainError, PreconditionError
from algcycle.ovalquad import reduced_hyperbolicity_integral
from algcycle.systems import catalog_instantiate

HALF_PI = math.pi / 2


def _quad(fn):
    with mpmath.workdps(30):
        return float(mpmath.quad(fn, [0, mpmath.pi / 4, mpmath.pi / 2]))


def K_oracle(w):
    return _quad(lambda t: 1 / mpmath.sqrt(1 - w * mpmath.sin(t) ** 2))


def E_oracle(w):
    return _quad(lambda t: mpmath.sqrt(1 - w * mpmath.sin(t) ** 2))


def Pi_oracle(k, w):
    return _quad(lambda t: 1 / ((1 - k * mpmath.sin(t) ** 2) * mpmath.sqrt(1 - w * mpmath.sin(t) ** 2)))


def _pairs(n=50, seed=11):
    rng = np.random.default_rng(seed)
    return list(zip(rng.uniform(-3.0, 0.95, n), rng.uniform(-2.0, 0.95, n)))


@pytest.mark.parametrize("kappa, omega", _pairs())
def test_against_quadrature_of_definitions(kappa, omega):
    assert elliptic_K(omega) == pytest.approx(K_oracle(mpmath.mpf(omega)), rel=1e-12)
    assert elliptic_E(omega) == pytest.approx(E_oracle(mpmath.mpf(omega)), rel=1e-12)
    assert elliptic_Pi(kappa, omega) == pytest.approx(Pi_oracle(mpmath.mpf(kappa), mpmath.mpf(omega)), rel=1e-12)


def test_special_values():
    assert elliptic_K(0.0) == pytest.approx(HALF_PI, rel=1e-15)
    assert elliptic_E(0.0) == pytest.approx(HALF_PI, rel=1e-15)
    for w in (-1.0, 0.2, 0.7, 0.99):
        assert elliptic_Pi(0.0, w) == pytest.approx(elliptic_K(w), rel=1e-15)
    for k in (-4.0, 0.1, 0.5, 0.9):
        assert elliptic_Pi(k, 0.0) == pytest.approx(math.pi / (2 * math.sqrt(1 - k)), rel=1e-14)
    assert elliptic_K(0.5) == pytest.approx(K_oracle(mpmath.mpf("0.5")), rel=1e-12)


def test_parameter_convention_matches_scipy():
    # scipy's ellipk/ellipe also take the parameter m, so they serve as a convention check
    for w in (0.1, 0.5, 0.9):
        assert elliptic_K(w) == pytest.approx(special.ellipk(w), rel=1e-14)
        assert elliptic_E(w) == pytest.approx(special.ellipe(w), rel=1e-14)


def test_legendre_relation():
    for w in np.linspace(0.02, 0.98, 25):
        lhs = elliptic_E(w) * elliptic_K(1 - w) + elliptic_E(1 - w) * elliptic_K(w) - elliptic_K(w) * elliptic_K(1 - w)
        assert abs(lhs - HALF_PI) <= 1e-12


def test_carlson_against_scipy():
    rng = np.random.default_rng(5)
    for _ in range(40):
        x, y, z, p = rng.uniform(0.0, 5.0, 4)
        assert carlson_rf(x, y, z) == pytest.approx(special.elliprf(x, y, z), rel=1e-14)
        assert carlson_rd(x, y, z + 0.1) == pytest.approx(special.elliprd(x, y, z + 0.1), rel=1e-14)
        assert carlson_rj(x, y, z, p + 0.1) == pytest.approx(special.elliprj(x, y, z, p + 0.1), rel=1e-13)
        assert carlson_rc(x, y + 0.1) == pytest.approx(special.elliprc(x, y + 0.1), rel=1e-14)


def test_domain_errors():
    for bad in (1.0, 1.5):
        with pytest.raises(DomainError):
            elliptic_K(bad)
        with pytest.raises(DomainError):
            elliptic_E(bad)
        with pytest.raises(DomainError):
            elliptic_Pi(0.2, bad)
        with pytest.raises(DomainError):
            elliptic_Pi(bad, 0.2)
    with pytest.raises(PreconditionError):
        elliptic_derivatives(0.4, 0.4)
    with pytest.raises(DomainError):
        elliptic_derivatives(0.0, 0.4)


def _fd(fn, x, h=1e-6):
    return (fn(x + h) - fn(x - h)) / (2 * h)


@pytest.mark.parametrize("omega, kappa", [(0.5, 0.3), (0.3, 0.5), (0.1, 0.8), (0.9, 0.2), (0.6, 0.65), (0.05, 0.05 + 1e-3)])
def test_derivatives_against_finite_differences(omega, kappa):
    dK, dE, dPk, dPw = elliptic_derivatives(omega, kappa)
    assert dK == pytest.approx(_fd(elliptic_K, omega), rel=1e-6)
    assert dE == pytest.approx(_fd(elliptic_E, omega), rel=1e-6)
    assert dPk == pytest.approx(_fd(lambda k: elliptic_Pi(k, omega), kappa), rel=1e-6)
    assert dPw == pytest.approx(_fd(lambda w: elliptic_Pi(kappa, w), omega), rel=1e-6)


def test_E_derivative_nonpositive():
    for w in np.linspace(0.01, 0.99, 40):
        assert elliptic_derivatives(w, 0.5 if abs(w - 0.5) > 1e-9 else 0.4)[1] <= 0


# -- identities ---------------------------------------------------------------


def test_relch2_parameters_at_three_sixteenths():
    p = relch2_params(Fraction(3, 16))
    assert p.omega0 == pytest.approx(2 / 3, rel=1e-15)
    for name in ("omega0", "omega_plus", "omega_minus"):
        assert 0 < getattr(p, name) < 1


@pytest.mark.parametrize("a", [Fraction(3, 16), 0.01, 0.24])
def test_relch2_examples(a):
    assert identity_relch2(a, scaled=True) <= 1e-10


def test_relch2_grid():
    for a in np.linspace(0.0025, 0.2475, 50):
        assert identity_relch2(a, scaled=True) <= 1e-10
        assert relch2_derivative_residual(a, scaled=True) <= 1e-8


@pytest.mark.parametrize("c", [0.25, 0.05, 0.45])
def test_relfil_examples(c):
    assert identity_relfil(c, scaled=True) <= 1e-10


def test_relfil_grid():
    for c in np.linspace(0.005, 0.495, 50):
        assert identity_relfil(c, scaled=True) <= 1e-10
        p = relfil_params(c)
        assert all(0 < v < 1 for v in (p.varsigma0, p.varsigma_plus, p.varsigma_minus))


def test_identity_domains():
    for bad in (0.0, 0.25, 0.3, -0.1):
        with pytest.raises(DomainError):
            identity_relch2(bad)
    for bad in (0.0, 0.5):
        with pytest.raises(DomainError):
            identity_relfil(bad)


# -- closed form D(a) ---------------------------------------------------------------


def test_D_boundary_values():
    q = Fraction(1, 4)
    assert abs(D_closed_form(q, 0)) <= 1e-9
    assert D_closed_form(q, 1) == pytest.approx(-8 * math.sqrt(2) * math.pi / 9, rel=1e-9)
    assert D_closed_form(q, 2) == pytest.approx(98 * math.sqrt(2) * math.pi / 27, rel=1e-9)
    assert D_BOUNDARY[1] == -8 * math.sqrt(2) * math.pi / 9


def test_D_against_reduced_quadrature():
    for a in (Fraction(3, 16), Fraction(1, 8), Fraction(1, 50)):
        red = reduced_hyperbolicity_integral(catalog_instantiate("chlls", {"a": a}))
        assert D_closed_form(a) == pytest.approx(red.D, rel=1e-8)


def test_D_derivatives_against_finite_differences():
    for a in (0.05, 0.125, 0.2):
        for k in (1, 2, 3):
            fd = _fd(lambda x: D_closed_form(x, k - 1), a, h=1e-5)
            assert D_closed_form(a, k) == pytest.approx(fd, rel=1e-6)


def test_D_continuous_across_precision_switch():
    # sqrt(1 - 4a) = 0.05 is where evaluation moves to extended precision
    a0 = (1 - 0.05**2) / 4
    for k in range(4):
        lo, hi = D_closed_form(a0 - 1e-12, k), D_closed_form(a0 + 1e-12, k)
        assert lo == pytest.approx(hi, rel=1e-6)


def test_D_domain_and_order():
    with pytest.raises(DomainError):
        D_closed_form(0.3)
    with pytest.raises(DomainError):
        D_closed_form(0.0)
    with pytest.raises(PreconditionError):
        D_closed_form(0.1, 4)


@pytest.mark.parametrize("a", [0.125, 0.05, 0.22])
def test_fuchs_examples(a):
    assert fuchs_residual(a, scaled=True) <= 1e-8


def test_fuchs_grid():
    for a in np.linspace(0.0025, 0.2475, 50):
        assert fuchs_residual(a, scaled=True) <= 1e-8
