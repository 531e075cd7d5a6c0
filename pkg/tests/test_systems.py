"""Catalog, cofactor identities, domains and birational maps."""

import math
from fractions import Fraction

import numpy as np
import pytest

from algcycle.algebra import BiPoly
from algcycle.errors import DomainError, PreconditionError
from algcycle.flow import rotation_field
from algcycle.systems import (
    CATALOG_IDS,
    CurveFunctions,
    InvariantCurve,
    catalog_instantiate,
    catalog_json,
    chavarriga_map,
    cofactor_residual,
    divergence,
    filipstov_map,
    gradient_nonvanishing_check,
    pointwise_residual,
    transform_divergence_check,
)
from algcycle.cli import transform_samples

Fr = Fraction

# Five in-domain rational parameter sets per polynomial family.
RATIONAL_GRID = {
    "chin2": [dict(a=1, b=0, c=2), dict(a=1, b=1, c=2), dict(a=-1, b=Fr(1, 2), c=3),
              dict(a=2, b=1, c=3), dict(a=Fr(1, 2), b=Fr(-1, 2), c=1)],
    "yablonskii": [dict(a=1, b=2, c=Fr(1, 2)), dict(a=1, b=2, c=1), dict(a=1, b=2, c=-1),
                   dict(a=2, b=3, c=2), dict(a=-1, b=-2, c=Fr(1, 2))],
    "filipstov": [dict(a=a) for a in (Fr(1, 10), Fr(1, 20), Fr(3, 26), Fr(1, 5), Fr(1, 7))],
    "chavarriga": [dict(a=a) for a in (Fr(-1, 50), Fr(-1, 100), Fr(-1, 40), Fr(-1, 500), Fr(-7, 250))],
    "chlls": [dict(a=a) for a in (Fr(1, 8), Fr(3, 16), Fr(1, 100), Fr(6, 25), Fr(1, 5))],
    "fil_transformed": [dict(c=c) for c in (Fr(3, 10), Fr(1, 20), Fr(9, 20), Fr(1, 4), Fr(1, 3))],
    "ch1_transformed": [dict(a=a) for a in (Fr(-1, 50), Fr(-1, 100), Fr(-1, 40), Fr(-1, 500), Fr(-7, 250))],
}


def _cases():
    for eid, grid in RATIONAL_GRID.items():
        for p in grid:
            yield pytest.param(eid, p, id=f"{eid}-{'-'.join(str(v) for v in p.values())}")


@pytest.mark.parametrize("eid, params", list(_cases()))
def test_cofactor_identity_exact(eid, params):
    e = catalog_instantiate(eid, params)
    res = cofactor_residual(e.system, e.curve, e.exact_param)
    assert res.is_zero() and res.terms == {}


def test_cofactor_identity_symbolic_in_parameter():
    # with the parameter left symbolic the identity already holds in Q(a)[x, y]
    for eid in ("filipstov", "chavarriga", "chlls", "fil_transformed", "ch1_transformed"):
        e = catalog_instantiate(eid, RATIONAL_GRID[eid][0])
        assert cofactor_residual(e.system, e.curve).is_zero(), eid


def test_perturbed_cofactor_leaves_minus_f():
    e = catalog_instantiate("chlls", {"a": Fr(1, 8)})
    one = BiPoly.constant(1, e.curve.k.vars, e.curve.k.ctx)
    bad = InvariantCurve("perturbed", e.curve.f, e.curve.k + one)
    assert cofactor_residual(e.system, bad) == -e.curve.f


def test_printed_divergences():
    e = catalog_instantiate("chlls", {"a": Fr(1, 8)})
    assert divergence(e.system) == BiPoly.parse("2*(2 - 5*a*x - 2*y)")
    nalc = catalog_instantiate("nalc", {})
    div = divergence(nalc.system)
    rng = np.random.default_rng(3)
    x, y = rng.uniform(-3, 3, 20), rng.uniform(-2, 2, 20)
    ref = -4 * y**2 + 2 * np.cos(x) - x * np.sin(x)
    assert np.allclose(div(x, y), ref, rtol=0, atol=1e-14)
    # the hand-coded partials agree with the generic field divergence
    assert np.allclose(nalc.vector_field().divergence(x, y), ref, atol=1e-13)
    assert rotation_field().divergence(0.3, -0.7) == 0


def test_nalc_partials_against_finite_differences():
    F = catalog_instantiate("nalc", {}).vector_field()
    h = 1e-6
    for x, y in [(0.3, -0.4), (1.1, 0.7), (-2.0, 0.2)]:
        num = np.array([[(F.P(x + h, y) - F.P(x - h, y)) / (2 * h), (F.P(x, y + h) - F.P(x, y - h)) / (2 * h)],
                        [(F.Q(x + h, y) - F.Q(x - h, y)) / (2 * h), (F.Q(x, y + h) - F.Q(x, y - h)) / (2 * h)]])
        assert np.allclose(F.jacobian(x, y), num, atol=1e-8)


def test_nalc_pointwise_residual():
    e = catalog_instantiate("nalc", {})
    rng = np.random.default_rng(0)
    pts = np.column_stack([rng.uniform(-math.pi / 2, math.pi / 2, 100), rng.uniform(-1, 1, 100)])
    cf = e.curve_functions()
    assert pointwise_residual(e.vector_field(), cf, pts) <= 1e-12
    wrong = CurveFunctions(cf.f, cf.f_x, cf.f_y, lambda x, y: cf.k(x, y) + 1)
    r = pointwise_residual(e.vector_field(), wrong, pts)
    assert r == pytest.approx(np.max(np.abs(cf.f(pts[:, 0], pts[:, 1]))), rel=1e-10)
    trivial = CurveFunctions(lambda x, y: 1 + 0 * x, lambda x, y: 0 * x, lambda x, y: 0 * x, lambda x, y: 0 * x)
    assert pointwise_residual(e.vector_field(), trivial, pts) == 0.0


def test_gradient_checks():
    th = np.linspace(0, 2 * np.pi, 64)
    circle = CurveFunctions(lambda x, y: x * x + y * y - 1, lambda x, y: 2 * x, lambda x, y: 2 * y, None)
    assert gradient_nonvanishing_check(circle, np.column_stack([np.cos(th), np.sin(th)])) == pytest.approx(2.0)
    with pytest.raises(PreconditionError):
        gradient_nonvanishing_check(circle, [(0.5, 0.5)])

    nalc = catalog_instantiate("nalc", {})
    x = np.linspace(-np.pi / 2, np.pi / 2, 201)
    y = np.sqrt(np.cos(x).clip(0))
    pts = np.concatenate([np.column_stack([x, y]), np.column_stack([x, -y])])
    assert gradient_nonvanishing_check(nalc.curve_functions(), pts) >= 1.0

    chlls = catalog_instantiate("chlls", {"a": Fr(1, 8)})
    assert gradient_nonvanishing_check(chlls.curve_functions(), chlls.oval_chart.samples(400)) > 1e-3


# -- parameter domains ------------------------------------------------------


@pytest.mark.parametrize(
    "eid, params, inequality",
    [
        ("chlls", {"a": Fr(1, 2)}, "0 < a < 1/4"),
        ("chlls", {"a": Fr(1, 4)}, "0 < a < 1/4"),
        ("chlls", {"a": 0}, "0 < a < 1/4"),
        ("filipstov", {"a": Fr(3, 13)}, "0 < a < 3/13"),
        ("fil_transformed", {"c": Fr(1, 2)}, "0 < c < 1/2"),
        ("chavarriga", {"a": 0}, "(-71 + 17*sqrt(17))/32 < a < 0"),
        ("ch1_transformed", {"a": Fr(-28351, 1000000)}, "(-71 + 17*sqrt(17))/32 < a < 0"),
        ("chin2", {"a": 0, "b": 0, "c": 2}, "a != 0"),
        ("chin2", {"a": 1, "b": 1, "c": 1}, "c^2 > a^2 + b^2"),
        ("chin2", {"a": 1, "b": -10, "c": 5}, "c^2 + 4(b+1) > 0"),
        ("yablonskii", {"a": 1, "b": 3, "c": 1}, "4c^2(a-b)^2 + (3a-b)(a-3b) < 0"),
        ("yablonskii", {"a": 1, "b": -2, "c": 1}, "ab > 0"),
    ],
)
def test_domain_rejections_name_the_inequality(eid, params, inequality):
    with pytest.raises(DomainError, match=inequality.replace("(", r"\(").replace(")", r"\)")
                       .replace("*", r"\*").replace("+", r"\+").replace("^", r"\^")):
        catalog_instantiate(eid, params)


def test_domain_acceptances():
    catalog_instantiate("chin2", {"a": 1, "b": 0, "c": 2})
    catalog_instantiate("ch1_transformed", {"a": Fr(-2835, 100000)})
    catalog_instantiate("chlls", {"a": 0.2499})
    catalog_instantiate("filipstov", {"a": Fr(3, 13) - Fr(1, 10**9)})
    catalog_instantiate("chlls", {"a": "3/16"})


def test_unknown_and_malformed_params():
    with pytest.raises(PreconditionError):
        catalog_instantiate("vanderpol", {})
    with pytest.raises(PreconditionError):
        catalog_instantiate("chlls", {})
    with pytest.raises(PreconditionError):
        catalog_instantiate("chlls", {"a": Fr(1, 8), "b": 1})


def test_aliases_and_metadata():
    assert catalog_instantiate("ch2", {"a": Fr(1, 8)}).id == "chlls"
    assert catalog_instantiate("fil", {"c": Fr(3, 10)}).id == "fil_transformed"
    expected = {
        "nalc": "stable", "filipstov": "unstable", "chavarriga": "stable", "chlls": "unstable",
        "fil_transformed": "unstable", "ch1_transformed": "unstable",
    }
    for eid, stab in expected.items():
        p = RATIONAL_GRID.get(eid, [{}])[0]
        assert catalog_instantiate(eid, p).expected_stability == stab
    assert catalog_instantiate("nalc", {"n": 1}).expected_stability == "center_band"
    assert catalog_instantiate("ch1_transformed", {"a": Fr(-1, 50)}).time_orientation == -1


def test_catalog_json_schema():
    entries = [catalog_instantiate(eid, RATIONAL_GRID.get(eid, [{}])[0]) for eid in CATALOG_IDS]
    doc = catalog_json(entries)
    assert doc["schema"] == 1 and len(doc["entries"]) == len(CATALOG_IDS)
    chlls = next(d for d in doc["entries"] if d["id"] == "chlls")
    assert BiPoly.parse(chlls["curve"]["f"]) == BiPoly.parse("1/4 + x - x^2 + a*x^3 + x*y + x^2*y^2")
    assert chlls["parameter_domain"] == ["0 < a < 1/4"]
    fil = next(d for d in doc["entries"] if d["id"] == "fil_transformed")
    assert fil["radical"] == "s^2 = 2*c + 1"


# -- birational maps ------------------------------------------------------


@pytest.fixture(scope="module")
def fil_entry():
    return catalog_instantiate("fil_transformed", {"c": Fr(3, 10)})


@pytest.fixture(scope="module")
def ch1_entry():
    return catalog_instantiate("ch1_transformed", {"a": Fr(-1, 50)})


@pytest.mark.parametrize("which", ["fil", "ch1"])
def test_map_round_trips(which, fil_entry, ch1_entry):
    e = fil_entry if which == "fil" else ch1_entry
    m = e.transform
    samples = transform_samples(e, n=100, seed=1)
    for u, v in samples:
        x, y = m.forward(u, v)
        uu, vv = m.inverse(x, y)
        assert math.hypot(uu - u, vv - v) <= 1e-12 * max(1.0, math.hypot(u, v))
        xx, yy = m.forward(uu, vv)
        assert math.hypot(xx - x, yy - y) <= 1e-12 * max(1.0, math.hypot(x, y))


@pytest.mark.parametrize("which", ["fil", "ch1"])
def test_divergence_transformation(which, fil_entry, ch1_entry):
    e = fil_entry if which == "fil" else ch1_entry
    m = e.transform
    dst = m.unreparameterize(e.vector_field())
    r = transform_divergence_check(m, e.source_entry().vector_field(), dst, transform_samples(e))
    assert r <= 1e-8


@pytest.mark.parametrize("which", ["fil", "ch1"])
def test_pushforward_is_time_rescaled_transform(which, fil_entry, ch1_entry):
    e = fil_entry if which == "fil" else ch1_entry
    m = e.transform
    push = m.pushforward(e.source_entry().vector_field())
    F = e.vector_field()
    for u, v in transform_samples(e, n=20, seed=2):
        h = m.time_factor(u, v)
        R, S = push(u, v)
        assert np.allclose([h * R, h * S], F(u, v), rtol=1e-10, atol=1e-10 * np.abs(F(u, v)).max())
        assert np.sign(h) == m.orientation


@pytest.mark.parametrize("which", ["fil", "ch1"])
def test_printed_inverse_jacobian(which, fil_entry, ch1_entry):
    e = fil_entry if which == "fil" else ch1_entry
    m = e.transform
    for u, v in transform_samples(e, n=20, seed=3):
        x, y = m.forward(u, v)
        assert m.inverse_jacobian_printed(x, y) * m.jacobian(u, v) == pytest.approx(1.0, rel=1e-10)


def test_identity_map_gives_zero(fil_entry):
    from algcycle.systems import _build_map

    import sympy as sp

    u, v, x, y, p = sp.symbols("u v x y p")
    ident = _build_map("identity", u, v, x, y, 1, +1, 1, p, 0.0)
    F = fil_entry.vector_field()
    pts = transform_samples(fil_entry, n=10)
    assert transform_divergence_check(ident, F, F, pts) == 0.0


def test_map_rejects_singular_sample(fil_entry):
    m = filipstov_map(0.3)
    F = fil_entry.vector_field()
    with pytest.raises(PreconditionError):
        # a floor above any attainable |J| makes every sample singular
        transform_divergence_check(m, F, F, [(0.5, 0.1)], jac_floor=1e300)
    assert chavarriga_map(-0.02).orientation == -1 and m.orientation == 1
