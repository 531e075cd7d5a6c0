"""Complete elliptic integrals, their identities, and the closed-form D(a).

All functions use the *parameter* convention: ``omega`` multiplies
``sin(theta)^2`` directly,

    K(w)     = int_0^{pi/2} dtheta / sqrt(1 - w sin^2)
    E(w)     = int_0^{pi/2} sqrt(1 - w sin^2) dtheta
    Pi(k, w) = int_0^{pi/2} dtheta / ((1 - k sin^2) sqrt(1 - w sin^2))

and are evaluated through Carlson's symmetric forms R_F, R_D, R_J with the
duplication algorithm.  The Carlson routines are written against a small
numeric backend so the same code runs in double precision and, through
mpmath, in extended precision.  Extended precision is used automatically
for the closed-form D(a) derivatives near a = 1/4, where the printed
formulas contain 1/(1 - 4a) factors that cancel analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import mpmath

from .errors import DomainError, PreconditionError

__all__ = [
    "carlson_rf",
    "carlson_rd",
    "carlson_rj",
    "carlson_rc",
    "elliptic_K",
    "elliptic_E",
    "elliptic_Pi",
    "elliptic_derivatives",
    "Relch2Params",
    "RelfilParams",
    "relch2_params",
    "relfil_params",
    "identity_relch2",
    "relch2_terms",
    "relch2_derivative_residual",
    "identity_relfil",
    "relfil_terms",
    "D_closed_form",
    "fuchs_terms",
    "fuchs_residual",
    "D_BOUNDARY",
]


# ---------------------------------------------------------------------------
# Numeric backends
# ---------------------------------------------------------------------------


class _Float:
    sqrt = staticmethod(math.sqrt)
    eps = 2.220446049250313e-16

    @staticmethod
    def num(v):
        return float(v)


class _Mp:
    sqrt = staticmethod(mpmath.sqrt)

    @property
    def eps(self):
        return mpmath.mp.eps

    @staticmethod
    def num(v):
        if isinstance(v, Fraction):
            return mpmath.mpf(v.numerator) / v.denominator
        return mpmath.mpf(v)


def _backend(*args):
    return _Mp() if any(isinstance(a, mpmath.mpf) for a in args) else _Float


# ---------------------------------------------------------------------------
# Carlson symmetric forms (duplication algorithm)
# ---------------------------------------------------------------------------


def carlson_rf(x, y, z):
    """R_F(x, y, z) for nonnegative arguments, at most one of them zero."""
    B = _backend(x, y, z)
    x, y, z = B.num(x), B.num(y), B.num(z)
    if min(x, y, z) < 0 or (x == 0) + (y == 0) + (z == 0) > 1:
        raise DomainError("R_F needs nonnegative arguments with at most one zero")
    A0 = (x + y + z) / 3
    Q = (3 * B.eps) ** (-1.0 / 6) * max(abs(A0 - x), abs(A0 - y), abs(A0 - z))
    A, xm, ym, zm, scale = A0, x, y, z, 1
    while scale * Q >= abs(A):
        sx, sy, sz = B.sqrt(xm), B.sqrt(ym), B.sqrt(zm)
        lam = sx * sy + sx * sz + sy * sz
        A, xm, ym, zm = (A + lam) / 4, (xm + lam) / 4, (ym + lam) / 4, (zm + lam) / 4
        scale /= 4
    X = (A0 - x) * scale / A
    Y = (A0 - y) * scale / A
    Z = -(X + Y)
    E2 = X * Y - Z * Z
    E3 = X * Y * Z
    return (1 - E2 / 10 + E3 / 14 + E2 * E2 / 24 - 3 * E2 * E3 / 44) / B.sqrt(A)


def carlson_rd(x, y, z):
    """R_D(x, y, z) for x, y >= 0 (at most one zero) and z > 0."""
    B = _backend(x, y, z)
    x, y, z = B.num(x), B.num(y), B.num(z)
    if min(x, y) < 0 or z <= 0 or (x == 0 and y == 0):
        raise DomainError("R_D needs x, y >= 0 (not both zero) and z > 0")
    A0 = (x + y + 3 * z) / 5
    Q = (B.eps / 4) ** (-1.0 / 6) * max(abs(A0 - x), abs(A0 - y), abs(A0 - z))
    A, xm, ym, zm, scale, acc = A0, x, y, z, 1, 0
    while scale * Q >= abs(A):
        sx, sy, sz = B.sqrt(xm), B.sqrt(ym), B.sqrt(zm)
        lam = sx * sy + sx * sz + sy * sz
        acc += scale / (sz * (zm + lam))
        A, xm, ym, zm = (A + lam) / 4, (xm + lam) / 4, (ym + lam) / 4, (zm + lam) / 4
        scale /= 4
    X = (A0 - x) * scale / A
    Y = (A0 - y) * scale / A
    Z = -(X + Y) / 3
    E2 = X * Y - 6 * Z * Z
    E3 = (3 * X * Y - 8 * Z * Z) * Z
    E4 = 3 * (X * Y - Z * Z) * Z * Z
    E5 = X * Y * Z * Z * Z
    series = 1 - 3 * E2 / 14 + E3 / 6 + 9 * E2 * E2 / 88 - 3 * E4 / 22 - 9 * E2 * E3 / 52 + 3 * E5 / 26
    return scale * series / (A * B.sqrt(A)) + 3 * acc


def carlson_rc(x, y):
    """R_C(x, y) for x >= 0, y > 0."""
    B = _backend(x, y)
    x, y = B.num(x), B.num(y)
    if x < 0 or y <= 0:
        raise DomainError("R_C needs x >= 0 and y > 0")
    A0 = (x + 2 * y) / 3
    Q = (3 * B.eps) ** (-1.0 / 8) * abs(A0 - x)
    A, xm, ym, scale = A0, x, y, 1
    while scale * Q >= abs(A):
        lam = 2 * B.sqrt(xm) * B.sqrt(ym) + ym
        A, xm, ym = (A + lam) / 4, (xm + lam) / 4, (ym + lam) / 4
        scale /= 4
    s = (y - A0) * scale / A
    s2, s3 = s * s, s * s * s
    series = 1 + 3 * s2 / 10 + s3 / 7 + 3 * s2 * s2 / 8 + 9 * s2 * s3 / 22 + 159 * s3 * s3 / 208 + 9 * s3 * s2 * s2 / 8
    return series / B.sqrt(A)


def carlson_rj(x, y, z, p):
    """R_J(x, y, z, p) for x, y, z >= 0 (at most one zero) and p > 0."""
    B = _backend(x, y, z, p)
    x, y, z, p = B.num(x), B.num(y), B.num(z), B.num(p)
    if min(x, y, z) < 0 or p <= 0 or (x == 0) + (y == 0) + (z == 0) > 1:
        raise DomainError("R_J needs x, y, z >= 0 with at most one zero and p > 0")
    A0 = (x + y + z + 2 * p) / 5
    delta = (p - x) * (p - y) * (p - z)
    Q = (B.eps / 4) ** (-1.0 / 6) * max(abs(A0 - x), abs(A0 - y), abs(A0 - z), abs(A0 - p))
    A, xm, ym, zm, pm, scale, acc = A0, x, y, z, p, 1, 0
    while scale * Q >= abs(A):
        sx, sy, sz, sp_ = B.sqrt(xm), B.sqrt(ym), B.sqrt(zm), B.sqrt(pm)
        lam = sx * sy + sx * sz + sy * sz
        d = (sp_ + sx) * (sp_ + sy) * (sp_ + sz)
        e = scale**3 * delta / (d * d)
        acc += scale * carlson_rc(1 + 0 * e, 1 + e) / d
        A = (A + lam) / 4
        xm, ym, zm, pm = (xm + lam) / 4, (ym + lam) / 4, (zm + lam) / 4, (pm + lam) / 4
        scale /= 4
    X = (A0 - x) * scale / A
    Y = (A0 - y) * scale / A
    Z = (A0 - z) * scale / A
    P = -(X + Y + Z) / 2
    E2 = X * Y + X * Z + Y * Z - 3 * P * P
    E3 = X * Y * Z + 2 * E2 * P + 4 * P * P * P
    E4 = (2 * X * Y * Z + E2 * P + 3 * P * P * P) * P
    E5 = X * Y * Z * P * P
    series = 1 - 3 * E2 / 14 + E3 / 6 + 9 * E2 * E2 / 88 - 3 * E4 / 22 - 9 * E2 * E3 / 52 + 3 * E5 / 26
    return scale * series / (A * B.sqrt(A)) + 6 * acc


# ---------------------------------------------------------------------------
# Complete integrals in the parameter convention
# ---------------------------------------------------------------------------


def _check_param(omega, name="omega"):
    if not omega < 1:
        raise DomainError(f"{name} = {omega} must be < 1")


def elliptic_K(omega):
    _check_param(omega)
    return carlson_rf(0 * omega, 1 - omega, 1 + 0 * omega)


def elliptic_E(omega):
    _check_param(omega)
    y = 1 - omega
    return carlson_rf(0 * omega, y, 1 + 0 * omega) - omega * carlson_rd(0 * omega, y, 1 + 0 * omega) / 3


def elliptic_Pi(kappa, omega):
    _check_param(omega)
    _check_param(kappa, "kappa")
    y = 1 - omega
    z = 1 + 0 * omega
    return carlson_rf(0 * omega, y, z) + kappa * carlson_rj(0 * omega, y, z, 1 - kappa) / 3


def elliptic_derivatives(omega, kappa) -> Tuple[float, float, float, float]:
    """(K'(w), E'(w), dPi/dkappa, dPi/domega) from the closed-form formulas."""
    if not (0 < omega < 1 and 0 < kappa < 1):
        raise DomainError("derivative formulas need 0 < omega < 1 and 0 < kappa < 1")
    if kappa == omega:
        raise PreconditionError("dPi/dkappa is singular at kappa == omega")
    K, E, Pi = elliptic_K(omega), elliptic_E(omega), elliptic_Pi(kappa, omega)
    w, k = omega, kappa
    dK = E / (2 * (1 - w) * w) - K / (2 * w)
    dE = (E - K) / (2 * w)
    dPk = K / (2 * k * (k - 1)) + E / (2 * (k - 1) * (w - k)) + (k * k - w) * Pi / (2 * k * (k - 1) * (w - k))
    dPw = E / (2 * (k - w) * (w - 1)) + Pi / (2 * (k - w))
    return dK, dE, dPk, dPw


# ---------------------------------------------------------------------------
# Identity for the chlls family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Relch2Params:
    s: float  # sqrt(1 - 4a), computed once
    r: float  # sqrt(16 - a)
    omega0: float
    omega_plus: float
    omega_minus: float
    c_plus: float
    c_minus: float
    mu: float
    b_plus: float
    b_minus: float


def _sqrt_one_minus_4a(a, B):
    if isinstance(a, Fraction):
        return B.sqrt(B.num(1 - 4 * a))
    return B.sqrt(1 - 4 * B.num(a))


def _relch2_from_s(s, a, B) -> Relch2Params:
    r = B.sqrt(16 - a)
    w0 = 2 * s / (1 + s)
    wp = 2 * s / (9 + s + 2 * r)
    wm = 2 * s / (9 + s - 2 * r)
    cp = (9 - s) / 2 + r
    cm = (9 - s) / 2 - r
    mu = B.sqrt(1 + s)
    return Relch2Params(s, r, w0, wp, wm, cp, cm, mu, 2 * (4 + r) * cp, 2 * (4 - r) * cm)


def relch2_params(a) -> Relch2Params:
    """Derived quantities for a in (0, 1/4]."""
    if not 0 < a <= Fraction(1, 4):
        raise DomainError(f"a = {a} outside (0, 1/4]")
    B = _backend(a)
    s = _sqrt_one_minus_4a(a, B)
    return _relch2_from_s(s, B.num(a), B)


def relch2_terms(a) -> Tuple[float, float, float]:
    """The three terms -9K(w0), c+ Pi(w+, w0), c- Pi(w-, w0)."""
    if not 0 < a < Fraction(1, 4):
        raise DomainError(f"a = {a} outside (0, 1/4)")
    p = relch2_params(a)
    return (
        -9 * elliptic_K(p.omega0),
        p.c_plus * elliptic_Pi(p.omega_plus, p.omega0),
        p.c_minus * elliptic_Pi(p.omega_minus, p.omega0),
    )


def identity_relch2(a, scaled: bool = False) -> float:
    """|-9K(w0) + c+ Pi(w+, w0) + c- Pi(w-, w0)|, optionally divided by the largest term."""
    t = relch2_terms(a)
    res = abs(sum(t))
    return res / max(abs(v) for v in t) if scaled else res


def relch2_derivative_residual(a, scaled: bool = False) -> float:
    """|d/da LHS + LHS/(1 - 4a + sqrt(1 - 4a))|.

    The a-derivative is assembled from the elliptic derivative formulas and
    the chain rule, so a small value confirms the identity's self-consistency
    under differentiation.
    """
    if not 0 < a < Fraction(1, 4):
        raise DomainError(f"a = {a} outside (0, 1/4)")
    a = float(a)
    p = relch2_params(a)
    s, r = p.s, p.r
    ds = -2 / s
    dr = -1 / (2 * r)
    dw0 = 2 * ds / (1 + s) ** 2
    dwp = (2 * ds * (9 + s + 2 * r) - 2 * s * (ds + 2 * dr)) / (9 + s + 2 * r) ** 2
    dwm = (2 * ds * (9 + s - 2 * r) - 2 * s * (ds - 2 * dr)) / (9 + s - 2 * r) ** 2
    dcp = -ds / 2 + dr
    dcm = -ds / 2 - dr
    w0 = p.omega0
    K = elliptic_K(w0)
    Pp, Pm = elliptic_Pi(p.omega_plus, w0), elliptic_Pi(p.omega_minus, w0)
    dK, _, dPp_k, dPp_w = elliptic_derivatives(w0, p.omega_plus)
    _, _, dPm_k, dPm_w = elliptic_derivatives(w0, p.omega_minus)
    lhs = -9 * K + p.c_plus * Pp + p.c_minus * Pm
    dlhs = (
        -9 * dK * dw0
        + dcp * Pp
        + p.c_plus * (dPp_k * dwp + dPp_w * dw0)
        + dcm * Pm
        + p.c_minus * (dPm_k * dwm + dPm_w * dw0)
    )
    res = abs(dlhs + lhs / (1 - 4 * a + s))
    if scaled:
        scale = max(abs(9 * dK * dw0), abs(dcp * Pp), abs(p.c_plus * dPp_w * dw0), abs(p.c_minus * dPm_w * dw0))
        return res / scale
    return res


# ---------------------------------------------------------------------------
# Identity for the transformed Filipstov family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelfilParams:
    q: float  # sqrt(1 - 4c^2)
    rho: float  # sqrt(64(1+2c)^2 + c^2)
    varsigma0: float
    varsigma_plus: float
    varsigma_minus: float
    C_plus: float
    C_minus: float


def relfil_params(c) -> RelfilParams:
    if not 0 < c < Fraction(1, 2):
        raise DomainError(f"c = {c} outside (0, 1/2)")
    if isinstance(c, Fraction):
        q = math.sqrt(1 - 4 * c * c)
    else:
        q = math.sqrt((1 - 2 * c) * (1 + 2 * c))
    c = float(c)
    rho = math.sqrt(64 * (1 + 2 * c) ** 2 + c * c)
    w0 = 2 * q / (1 + q)
    dp = 9 + 17 * c + q + rho
    dm = 9 + 17 * c + q - rho
    return RelfilParams(
        q, rho, w0, 2 * q / dp, 2 * q / dm, -2 * (24 + 47 * c + 3 * rho) / dp, -2 * (24 + 47 * c - 3 * rho) / dm
    )


def relfil_terms(c) -> Tuple[float, float, float]:
    p = relfil_params(c)
    return (
        5 * elliptic_K(p.varsigma0),
        p.C_plus * elliptic_Pi(p.varsigma_plus, p.varsigma0),
        p.C_minus * elliptic_Pi(p.varsigma_minus, p.varsigma0),
    )


def identity_relfil(c, scaled: bool = False) -> float:
    """|5K(s0) + C+ Pi(s+, s0) + C- Pi(s-, s0)|, optionally divided by the largest term."""
    t = relfil_terms(c)
    res = abs(sum(t))
    return res / max(abs(v) for v in t) if scaled else res


# ---------------------------------------------------------------------------
# Closed-form D(a) for the chlls family and its derivatives
# ---------------------------------------------------------------------------

# Below this value of sqrt(1 - 4a) the derivative formulas lose digits to the
# 1/(1 - 4a) factors; evaluation then switches to extended precision.
_S_EXTENDED = 0.05
_EXTENDED_DPS = 160
_S_AT_BOUNDARY = "1e-40"

D_BOUNDARY = {
    0: 0.0,
    1: -8 * math.sqrt(2) * math.pi / 9,
    2: 98 * math.sqrt(2) * math.pi / 27,
}


def _D_from_s(s, B, order: int):
    a = (1 - s * s) / 4
    p = _relch2_from_s(s, a, B)
    r, mu, cp, cm = p.r, p.mu, p.c_plus, p.c_minus
    K = elliptic_K(p.omega0)
    Pp, Pm = elliptic_Pi(p.omega_plus, p.omega0), elliptic_Pi(p.omega_minus, p.omega0)
    sq2 = B.sqrt(2 + 0 * s)
    if order == 0:
        return sq2 / (mu * r) * (-34 * r * K + p.b_plus * Pp - p.b_minus * Pm)
    E = elliptic_E(p.omega0)
    m2 = mu * mu
    s2 = s * s  # = 1 - 4a
    if order == 1:
        return -4 * sq2 / (mu * r**3) * (r * K + 2 * m2 * r / a * E - cp * Pp + cm * Pm)
    if order == 2:
        return 6 * sq2 / (mu * r**5) * (
            (10 * a * a + 33 * a - 64) * r / (3 * a * s2) * K
            + (73 * a * a - 420 * a + 128) * m2 * r / (6 * a * a * s2) * E
            + cp * Pp
            - cm * Pm
        )
    if order == 3:
        pk = 180 * a**4 + 1347 * a**3 - 9685 * a**2 + 25664 * a - 4096
        pe = 1812 * a**4 - 20259 * a**3 + 102164 * a**2 - 60544 * a + 8192
        return -sq2 / (mu * r**7) * (
            pk * r / (a * a * s2 * s2) * K + pe * m2 * r / (2 * a**3 * s2 * s2) * E - 15 * cp * Pp + 15 * cm * Pm
        )
    raise PreconditionError(f"order must be 0..3, got {order}")


def D_closed_form(a, order: int = 0) -> float:
    """D(a) = integral of div over the chlls limit cycle, or its a-derivative.

    Valid on (0, 1/4]; at a = 1/4 the value is the limit a -> 1/4-.
    """
    if order not in (0, 1, 2, 3):
        raise PreconditionError(f"order must be 0..3, got {order}")
    if not 0 < a <= Fraction(1, 4):
        raise DomainError(f"a = {a} outside (0, 1/4]")
    s = math.sqrt(float(1 - 4 * a)) if isinstance(a, Fraction) else math.sqrt(max(1 - 4 * a, 0.0))
    if s >= _S_EXTENDED:
        return float(_D_from_s(s, _Float, order))
    with mpmath.workdps(_EXTENDED_DPS):
        if s == 0:
            s_mp = mpmath.mpf(_S_AT_BOUNDARY)
        elif isinstance(a, Fraction):
            s_mp = mpmath.sqrt(1 - 4 * (mpmath.mpf(a.numerator) / a.denominator))
        else:
            s_mp = mpmath.sqrt(1 - 4 * mpmath.mpf(a))
        return float(_D_from_s(s_mp, _Mp(), order))


def fuchs_terms(a) -> Tuple[float, float, float, float]:
    """The four terms of the third-order Fuchs equation satisfied by D(a)."""
    if not 0 < a < Fraction(1, 4):
        raise DomainError(f"a = {a} outside (0, 1/4)")
    D0, D1, D2, D3 = (D_closed_form(a, k) for k in range(4))
    a = float(a)
    return (
        8 * (a - 16) * a * (4 * a - 1) * (17 * a + 8) * D3,
        4 * (612 * a**3 - 4119 * a**2 - 2600 * a + 512) * D2,
        6 * (a - 2) * (289 * a + 528) * D1,
        3 * (17 * a + 64) * D0,
    )


def fuchs_residual(a, scaled: bool = False) -> float:
    """|LHS| of the Fuchs equation at a, optionally divided by the largest term."""
    t = fuchs_terms(a)
    res = abs(math.fsum(t))
    return res / max(abs(v) for v in t) if scaled else res
