import json
import math

import numpy as np
import pytest

from chentype.errors import DomainError, SpecParseError
from chentype.surfaces import (
    CurveTerm,
    cylinder,
    dump_spec,
    evaluate_chart,
    graph,
    helicoid,
    load_spec,
    ruled,
    sample_grid,
    sphere,
    torus,
    validate_ruled_normalization,
)

CATALOG = {
    "sphere": sphere(1.0),
    "torus": torus(2.0, 1.0),
    "helicoid": helicoid(1.5),
    "cylinder": cylinder(1.0),
    "graph": graph([(1.0, 2, 0), (1.0, 0, 2), (0.3, 3, 0)]),
    "ruled": ruled(
        [CurveTerm("poly", 2, 1.0, 1), CurveTerm("poly", 2, 0.3, 2)],
        [CurveTerm("cos", 0, 1.0, 1.0), CurveTerm("sin", 1, 1.0, 1.0)],
    ),
}

HELIX_RULING = [CurveTerm("cos", 0, 1.0, 1.0), CurveTerm("sin", 1, 1.0, 1.0)]


def test_sphere_chart_at_origin():
    x = evaluate_chart(sphere(1.0), (0.0, 0.0), 0)
    assert np.allclose(x.value, [1.0, 0.0, 0.0])


def test_helicoid_first_derivatives():
    x = evaluate_chart(helicoid(1.0), (0.0, 2.0), 1)
    assert np.allclose(x.value, [2.0, 0.0, 0.0])
    assert np.allclose(x.coeff_vector(1, 0), [0.0, 2.0, 1.0])
    assert np.allclose(x.coeff_vector(0, 1), [1.0, 0.0, 0.0])


def test_ruled_matches_helicoid_exactly():
    spec = ruled([CurveTerm("poly", 2, 1.0, 1)], HELIX_RULING, domain=((-2, 2), (-2, 2)))
    a = evaluate_chart(spec, (0.4, -0.7), 8)
    b = evaluate_chart(helicoid(1.0), (0.4, -0.7), 8)
    for u, v in zip(a, b):
        assert np.allclose(u.coeffs, v.coeffs, rtol=0, atol=1e-15)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_truncation_consistency(name):
    spec = CATALOG[name]
    (s0, s1), (t0, t1) = spec.domain
    p = (0.3 * s0 + 0.7 * s1, 0.6 * t0 + 0.4 * t1)
    hi = evaluate_chart(spec, p, 7)
    lo = evaluate_chart(spec, p, 6)
    for u, v in zip(hi.truncate(6), lo):
        assert np.allclose(u.coeffs, v.coeffs, rtol=1e-14, atol=1e-15)


@pytest.mark.parametrize("name", ["helicoid", "cylinder", "ruled"])
def test_ruled_charts_are_linear_in_t(name):
    x = evaluate_chart(CATALOG[name], (0.2, 0.5), 6)
    for c in x.partial("t").partial("t"):
        assert c.scale() == 0.0


def test_point_outside_domain():
    with pytest.raises(DomainError):
        evaluate_chart(sphere(1.0), (0.0, 5.0), 2)


def test_sample_grid_layout():
    pts = sample_grid(((0, 1), (0, 2)), 2, 4)
    assert len(pts) == 8
    assert pts[0] == (0.125, 0.5)
    assert pts[1][1] == pts[0][1]  # row-major along s
    assert pts[4][1] == 1.5


class TestNormalization:
    def test_helicoid_is_exact(self):
        rep = validate_ruled_normalization(helicoid(1.0))
        assert rep.passed and rep.max_violation <= 4e-16

    def test_double_speed_ruling(self):
        rho = [CurveTerm("cos", 0, 1.0, 2.0), CurveTerm("sin", 1, 1.0, 2.0)]
        rep = validate_ruled_normalization(ruled([CurveTerm("poly", 2, 1.0, 1)], rho))
        assert rep.speed_violation == pytest.approx(3.0)
        assert not rep.unit_speed_ruling and rep.unit_ruling and rep.orthogonal

    def test_cylinder_ruling_is_constant(self):
        rep = validate_ruled_normalization(cylinder(1.0))
        assert rep.speed_violation == pytest.approx(1.0)
        assert rep.to_dict()["max_violation"] == pytest.approx(1.0)


class TestLoadSpec:
    def test_sphere(self):
        spec = load_spec('{"kind": "sphere", "r": 1.0}')
        assert spec.kind == "sphere" and spec.params["r"] == 1.0

    def test_helicoid(self):
        assert load_spec({"kind": "helicoid", "c": 2.0}).params["c"] == 2.0

    def test_negative_radius(self):
        with pytest.raises(SpecParseError, match="r must be positive") as info:
            load_spec('{"kind": "sphere", "r": -1}')
        assert info.value.location == "$.r"

    @pytest.mark.parametrize(
        "doc, where",
        [
            ('{"kind": "cone"}', "$.kind"),
            ('{"kind": "torus", "R": 2}', "$.r"),
            ('{"kind": "helicoid", "c": "two"}', "$.c"),
            ('{"kind": "helicoid", "c": 0}', "$.c"),
            ('{"kind": "torus", "R": 1, "r": 2}', "$.R"),
            ('{"kind": "sphere", "r": 1, "domain": {"s": [1, 0], "t": [0, 1]}}', "$.domain.s"),
            ('{"kind": "ruled", "gamma": [{"type": "exp", "axis": 0, "coeff": 1, "freq_or_degree": 1}],'
             ' "rho": []}', "$.gamma[0].type"),
        ],
    )
    def test_errors_carry_location(self, doc, where):
        with pytest.raises(SpecParseError) as info:
            load_spec(doc)
        assert info.value.location == where

    def test_malformed_json(self):
        with pytest.raises(SpecParseError, match="malformed JSON"):
            load_spec('{"kind": "sphere", "r": ')

    @pytest.mark.parametrize("name", ["sphere", "torus", "helicoid", "graph", "ruled"])
    def test_dump_roundtrip(self, name):
        spec = CATALOG[name]
        again = load_spec(json.dumps(dump_spec(spec)))
        p = (0.1, 0.2)
        a, b = evaluate_chart(spec, p, 4), evaluate_chart(again, p, 4)
        assert all(np.array_equal(u.coeffs, v.coeffs) for u, v in zip(a, b))


def test_torus_chart_value():
    x = evaluate_chart(torus(2.0, 1.0), (math.pi / 2, 0.0), 0)
    assert np.allclose(x.value, [0.0, 3.0, 0.0], atol=1e-15)
