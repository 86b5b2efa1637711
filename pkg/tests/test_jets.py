import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chentype.errors import OrderMismatchError, SingularCompositionError
from chentype.jets import Jet, JetVec3, Series, compose, index, jet_mul, jet_partial, monomials, ncoeffs

from fieldcatalog import BASE_POINTS, FIELDS, max_relative_error

coef = st.floats(-2.0, 2.0, allow_nan=False)


def jets(order):
    n = ncoeffs(order)
    return st.lists(coef, min_size=n, max_size=n).map(lambda c: Jet(np.array(c), order))


def test_layout_is_graded_lex():
    assert ncoeffs(4) == 15
    assert [index(a, b) for a, b in monomials(2)] == list(range(6))
    assert monomials(2) == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))


@pytest.mark.parametrize("name", sorted(FIELDS))
@pytest.mark.parametrize("point", BASE_POINTS)
def test_coefficients_match_finite_differences(name, point):
    assert max_relative_error(FIELDS[name], *point, order=4) <= 1e-6


def test_product_of_variables():
    s = Jet.variable("s", 0.5, 3)
    t = Jet.variable("t", -1.0, 3)
    p = s * t
    assert p.coeff(0, 0) == pytest.approx(-0.5)
    assert p.coeff(1, 0) == pytest.approx(-1.0)
    assert p.coeff(0, 1) == pytest.approx(0.5)
    assert p.coeff(1, 1) == pytest.approx(1.0)
    assert p.coeff(2, 0) == 0.0


def test_sin_of_s_has_alternating_derivatives():
    s = Jet.variable("s", 0.0, 7)
    f = s.sin()
    assert [f.derivative(k, 0) for k in range(8)] == pytest.approx([0, 1, 0, -1, 0, 1, 0, -1], abs=1e-15)


def test_reciprocal_at_zero_rejected():
    with pytest.raises(SingularCompositionError):
        Jet.variable("s", 0.0, 3).reciprocal()


def test_sqrt_of_negative_rejected():
    with pytest.raises(SingularCompositionError) as info:
        (Jet.variable("s", 0.0, 2) - 1.0).sqrt()
    assert "-1.0" in str(info.value)


def test_order_mismatch_in_binary_ops():
    with pytest.raises(OrderMismatchError):
        Jet.variable("s", 0.0, 2) + Jet.variable("t", 0.0, 3)


@settings(max_examples=60, deadline=None)
@given(jets(5), jets(5))
def test_leibniz_rule(f, g):
    for d in ("s", "t"):
        lhs = jet_partial(jet_mul(f, g), d)
        rhs = jet_partial(f, d) * g.truncate(4) + f.truncate(4) * jet_partial(g, d)
        assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-11)


@settings(max_examples=60, deadline=None)
@given(jets(5))
def test_mixed_partials_commute(f):
    a = f.partial("s").partial("t")
    b = f.partial("t").partial("s")
    assert np.array_equal(a.coeffs, b.coeffs)


@settings(max_examples=60, deadline=None)
@given(jets(6), st.floats(0.5, 3.0))
def test_reciprocal_inverts(f, shift):
    f = f * 0.1 + shift
    one = f * f.reciprocal()
    expected = Jet.constant(1.0, 6)
    assert np.allclose(one.coeffs, expected.coeffs, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(jets(5), st.floats(0.5, 3.0))
def test_sqrt_squares_back(f, shift):
    f = f * 0.1 + shift
    r = f.sqrt()
    assert np.allclose((r * r).coeffs, f.coeffs, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(jets(6))
def test_pythagorean_identity(f):
    c, s = f.cos(), f.sin()
    assert np.allclose((c * c + s * s).coeffs, Jet.constant(1.0, 6).coeffs, atol=1e-11)


@settings(max_examples=40, deadline=None)
@given(jets(4))
def test_truncation_commutes_with_product(f):
    g = f.sin()
    assert np.allclose((f * g).truncate(2).coeffs, (f.truncate(2) * g.truncate(2)).coeffs, atol=1e-14)


def test_compose_power_matches_repeated_product():
    f = Jet.variable("s", 1.3, 5) + Jet.variable("t", 0.2, 5) * 0.5
    assert compose("power", f, 3).allclose(f * f * f)


def test_series_antiderivative_roundtrip():
    x = Series.variable(0.4, 6).cos()
    back = x.derivative().antiderivative(x.value)
    assert np.allclose(back.coeffs, x.coeffs)


def test_series_lift_has_no_t_dependence():
    j = Series.variable(0.1, 4).sin().lift(4)
    assert j.partial("t").scale() == 0.0
    assert j.coeff(3, 0) == pytest.approx(-math.cos(0.1) / 6)


def test_vector_cross_and_norm():
    s = Jet.variable("s", 0.2, 3)
    t = Jet.variable("t", 0.7, 3)
    one = Jet.constant(1.0, 3)
    zero = Jet.zero(3)
    u = JetVec3(s, t, one)
    v = JetVec3(one, zero, zero)
    w = u.cross(v)
    assert np.allclose(w.value, np.cross(u.value, v.value))
    assert u.norm().value == pytest.approx(math.sqrt(0.04 + 0.49 + 1))
    assert u.dot(w).scale() < 1e-15
