from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padiclab.poly import SparsePolynomial, parse_poly


def test_parse_aliases_and_rationals():
    f = parse_poly("3/2*x^2*y - y**3 + 5")
    assert f.nvars == 2
    assert f(2, 1) == Fraction(3, 2) * 4 - 1 + 5


def test_str_round_trip():
    f = parse_poly("x0^3 - 2*x0*x1 + 1/3", 2)
    assert parse_poly(str(f), 2) == f


def test_json_round_trip():
    f = parse_poly("x^2 + 7/5*y")
    assert SparsePolynomial.from_json(f.to_json()) == f
    assert SparsePolynomial.from_json({"poly": "x^2 + 7/5*y"}) == f


@pytest.mark.parametrize("bad", ["", "x^", "2**", "q + 1", "x + * y"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_poly(bad)


def test_integral_form():
    f = parse_poly("9/2*x + 3/4")
    c, s, G = f.integral_form(3)
    assert c == 1
    assert G.scale(s * 3**c) == f
    assert all(v.denominator == 1 for _, v in G.terms)


def test_reversed():
    f = SparsePolynomial.univariate([1, 0, 2])
    assert f.reversed(3) == SparsePolynomial.univariate([0, 2, 0, 1])


def test_compose_and_derivative():
    f = parse_poly("x^3 + x")
    g = f.compose([parse_poly("x + 1")])
    assert g == parse_poly("x^3 + 3*x^2 + 4*x + 2")
    assert f.derivative(0) == parse_poly("3*x^2 + 1")


coeffs = st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=9), min_size=1, max_size=5)


@settings(max_examples=60, deadline=None)
@given(coeffs, coeffs, st.fractions(min_value=-5, max_value=5, max_denominator=5))
def test_ring_homomorphism_under_evaluation(a, b, x):
    f, g = SparsePolynomial.univariate(a), SparsePolynomial.univariate(b)
    assert (f * g)(x) == f(x) * g(x)
    assert (f + g)(x) == f(x) + g(x)
    assert f.compose([g])(x) == f(g(x))
