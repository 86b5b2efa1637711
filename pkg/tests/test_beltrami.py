import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chentype.beltrami import (
    Form,
    beltrami_first,
    beltrami_grad,
    beltrami_second,
    identity_suite,
    vector_residual,
)
from chentype.errors import InsufficientOrderError, ParabolicPointError
from chentype.forms import connections, fundamental_forms
from chentype.jets import Jet
from chentype.ruledsym import p1_closed_form, ruled_invariants
from chentype.surfaces import evaluate_chart, graph, helicoid, ruled_curves, sample_grid, sphere, torus

PARABOLOID = graph([(1.0, 2, 0), (1.0, 0, 2)])


def setup(spec, p, order=7, orientation=1):
    x = evaluate_chart(spec, p, order)
    fb = fundamental_forms(x, orientation=orientation)
    return x, fb, connections(x, fb)


def test_first_parameter_at_paraboloid_vertex():
    x, fb, _ = setup(PARABOLOID, (0.0, 0.0))
    s = x.x  # the coordinate field s
    assert beltrami_first("I", s, s, fb).value == pytest.approx(1.0)


@pytest.mark.parametrize("J", list(Form))
def test_pairing_with_constant_vanishes(J):
    x, fb, _ = setup(helicoid(1.0), (0.2, 0.9))
    c = Jet.constant(3.0, x.order)
    assert beltrami_first(J, x.y, c, fb).scale() == 0.0


def test_normal_pairing_on_sphere():
    x, fb, _ = setup(sphere(1.0), (0.3, 0.2))
    h = x.x
    assert vector_residual(beltrami_first("II", h, fb.normal, fb), beltrami_grad("I", h, fb)) <= 1e-9


def test_gradient_of_constant_is_zero():
    _, fb, _ = setup(torus(2.0, 1.0), (0.3, 0.2))
    g = beltrami_grad("I", Jet.constant(2.0, 5), fb)
    assert np.all(g.value == 0.0)


def test_gradient_of_curvature_on_sphere_vanishes():
    _, fb, _ = setup(sphere(1.0), (0.3, 0.2))
    assert np.linalg.norm(beltrami_grad("III", fb.K, fb).value) < 1e-13


def test_helicoid_curvature_gradient_is_along_the_ruling():
    _, fb, _ = setup(helicoid(1.0), (0.0, 1.0))
    grad = beltrami_grad("I", fb.K, fb).value
    # K = -1/(1+t^2)^2 depends on t only; x_t = (cos s, sin s, 0) = (1, 0, 0) at s = 0
    dK = 4 * 1.0 / (1 + 1.0) ** 3
    assert np.allclose(grad, [dK, 0.0, 0.0], atol=1e-13)


def test_laplacians_on_unit_sphere():
    x, fb, cb = setup(sphere(1.0), (-0.6, 0.4))
    n = fb.normal.value
    assert vector_residual(beltrami_second("II", x, fb, cb), 2.0 * n) <= 1e-8
    assert vector_residual(beltrami_second("II", fb.normal, fb, cb), -2.0 * fb.H.value * n) <= 1e-8


def test_first_laplacian_of_coordinate_at_vertex():
    x, fb, cb = setup(PARABOLOID, (0.0, 0.0))
    assert abs(beltrami_second("I", x.x, fb, cb).value) < 1e-14


def test_helicoid_laplacian_matches_closed_form():
    spec = helicoid(1.0)
    gamma, rho = ruled_curves(spec)
    for s0, t0 in [(0.3, 0.7), (-1.1, -1.5)]:
        x, fb, cb = setup(spec, (s0, t0))
        inv = ruled_invariants(gamma, rho, s0, 0)
        lap = beltrami_second("II", x, fb, cb).value
        expected = p1_closed_form(inv)(t0)
        rho_prime = np.array([-np.sin(s0), np.cos(s0), 0.0])
        assert np.allclose(lap, expected, rtol=1e-12)
        # m = 0, so the Laplacian is a multiple of rho'
        assert np.allclose(lap, -2 * np.sqrt(t0 * t0 + 1) * rho_prime, rtol=1e-12)


def test_parabolic_circle_of_torus_rejected():
    x = evaluate_chart(torus(2.0, 1.0, domain=((0, 6.3), (0, 3.2))), (0.0, np.pi / 2), 5)
    with pytest.raises(ParabolicPointError):
        fundamental_forms(x)


def test_order_deficiency():
    x, fb, cb = setup(sphere(1.0), (0.1, 0.1), order=5)
    with pytest.raises(InsufficientOrderError):
        beltrami_second("I", x.x.truncate(1), fb, cb)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.sampled_from(list(Form)))
def test_laplacian_is_linear(alpha, beta, J):
    x, fb, cb = setup(torus(2.0, 1.0), (0.5, 0.3))
    f = x.x * x.y
    h = (x.z + 2.0).sqrt()
    lhs = beltrami_second(J, f * alpha + h * beta, fb, cb)
    rhs = beltrami_second(J, f, fb, cb) * alpha + beltrami_second(J, h, fb, cb) * beta
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-11 * (1 + abs(alpha) + abs(beta)))


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_sphere_position_is_an_eigenvector(r):
    lams = []
    for p in sample_grid(sphere(r).domain, 3, 3):
        x, fb, cb = setup(sphere(r), p)
        lap = beltrami_second("II", x, fb, cb).value
        lams.append(lap @ x.value / (x.value @ x.value))
        assert vector_residual(lap, -lams[-1] * x.value) <= 1e-8
    assert np.ptp(lams) <= 1e-8
    assert abs(lams[0]) == pytest.approx(2 / r, rel=1e-10)


@pytest.mark.parametrize(
    "spec",
    [sphere(1.0), helicoid(1.0), helicoid(2.0), torus(2.0, 1.0), graph([(1.0, 2, 0), (1.0, 0, 2), (0.3, 3, 0)])],
    ids=lambda s: s.label(),
)
@pytest.mark.parametrize("orientation", [1, -1])
def test_identity_suite(spec, orientation):
    for p in sample_grid(spec.domain, 3, 3):
        x, fb, cb = setup(spec, p, order=6, orientation=orientation)
        res = identity_suite(fb, cb, x)
        assert len(res) == 10
        assert max(res.values()) <= 1e-8, res
