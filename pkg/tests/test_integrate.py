from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padiclab.integrate import (
    Coset,
    Integrand,
    change_of_variables_check,
    integrate,
    reduce_center,
    stratum_closed_form,
    zero_locus_mass,
)
from padiclab.padic import valuation
from padiclab.poly import SparsePolynomial, parse_poly
from padiclab.radical import RadicalValue


def brute(p, polys, n, depth):
    """Lower sum and unresolved mass by listing every residue mod p^depth."""
    lo = RadicalValue.zero(p)
    bad = 0
    for a in product(range(p**depth), repeat=n):
        term = RadicalValue.rational(p, 1)
        for f, r in polys:
            c = min(valuation(v, p) for _, v in f.terms)
            v = valuation(f(*a), p)
            if v >= c + depth:
                term = None
                break
            term = term * RadicalValue.p_power(p, -v * r)
        if term is None:
            bad += 1
        else:
            lo += term
    return lo * Fraction(1, p ** (n * depth)), Fraction(bad, p ** (n * depth))


def test_reduce_center():
    assert reduce_center(Fraction(10), 2, 3) == 1
    assert reduce_center(Fraction(-1, 3), 1, 3) == Fraction(8, 3)
    assert reduce_center(Fraction(5, 9), -2, 3) == 0


def test_coset_children_partition():
    c = Coset(3, 1, (Fraction(1, 3),))
    kids = list(c.children())
    assert len(kids) == 3
    assert sum(k.mass for k in kids) == c.mass
    assert all(c.contains(k.center) for k in kids)


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("r", [Fraction(1), Fraction(2), Fraction(1, 2)])
def test_monomial_closed_form(p, r):
    res = integrate(Integrand([(parse_poly("x"), r)]), depth=8, p=p)
    expected = RadicalValue.rational(p, 1 - Fraction(1, p)) / (1 - RadicalValue.p_power(p, -(1 + r)))
    assert res.contains(expected)
    assert res.width() <= RadicalValue.p_power(p, -8 * (1 + r))


def test_half_power_value():
    # (1 - 1/3) / (1 - 3^(-3/2)) = (9 + sqrt 3) / 13
    res = integrate(Integrand([(parse_poly("x"), Fraction(1, 2))]), depth=10, p=3)
    assert res.contains(RadicalValue(3, 2, [Fraction(9, 13), Fraction(1, 13)]))


def test_product_of_coordinates():
    res = integrate(Integrand([(parse_poly("x*y"), 1)]), depth=6, p=3)
    assert res.contains(Fraction(9, 16))


def test_quadratic_with_two_roots():
    # 1 - 2/p + (2/p) * int_{pZ_p}|z| normalised = 2/3 for p = 5
    res = integrate(Integrand([(parse_poly("x^2 - 1"), 1)]), depth=7, p=5)
    assert res.contains(Fraction(2, 3))


def test_negative_exponent_is_exact():
    res = integrate(Integrand([(parse_poly("x"), Fraction(-1, 2))]), depth=4, p=3)
    assert res.is_exact()
    assert res.lower == stratum_closed_form(3, Fraction(-1, 2))
    assert res.lower == 1 + RadicalValue.p_power(3, Fraction(1, 2)) / 3


def test_divergent_integral_is_unbounded():
    res = integrate(Integrand([(parse_poly("x^2"), Fraction(-1, 2))]), depth=4, p=3)
    assert not res.bounded


def test_zero_locus_mass():
    assert zero_locus_mass(parse_poly("x^2 - 1"), 3, p=5) == Fraction(2, 125)
    assert zero_locus_mass(parse_poly("x^2 - 2"), 3, p=5) == 0


CASES = [
    (3, [("x^3 - x", 1)], 1),
    (5, [("x^2 + 1", Fraction(1, 2))], 1),
    (3, [("x", 1), ("x + 1", 2)], 1),
    (3, [("x^2 - y^2", 1)], 2),
    (3, [("x*y - 1", Fraction(3, 2))], 2),
    (5, [("x^2 + y^3 + 5", 1)], 2),
]


@pytest.mark.parametrize("p,terms,n", CASES)
def test_against_residue_enumeration(p, terms, n):
    polys = [(parse_poly(t, n), Fraction(r)) for t, r in terms]
    res = integrate(Integrand(polys), depth=3, p=p)
    lo, mass = brute(p, polys, n, 3)
    assert res.lower == lo
    assert res.unresolved_mass == mass


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.integers(-9, 9), min_size=2, max_size=4).filter(lambda c: c[-1] != 0),
    st.sampled_from([3, 5]),
    st.sampled_from([Fraction(1), Fraction(1, 2), Fraction(2)]),
)
def test_enclosures_nest_with_depth(coeffs, p, r):
    f = Integrand([(SparsePolynomial.univariate(coeffs), r)])
    shallow = integrate(f, depth=2, p=p)
    deep = integrate(f, depth=4, p=p)
    assert shallow.lower <= deep.lower
    assert deep.upper <= shallow.upper


def test_affine_change_of_variables_exact():
    mapping = [parse_poly("2*x + y + 1", 2), parse_poly("x + 4*y", 2)]
    rep = change_of_variables_check(mapping, Coset(3, 0, (0, 0)), Integrand([(parse_poly("x*y", 2), 1)]), 3)
    assert rep.affine and rep.exact_equal


def test_non_unimodular_affine_map():
    mapping = [parse_poly("3*x + 1")]
    rep = change_of_variables_check(mapping, Coset(3, 0, (0,)), Integrand([(parse_poly("x"), 1)]), 4)
    assert rep.jacobian_valuation == 1
    assert rep.exact_equal


def test_nonlinear_change_of_variables_intersects():
    mapping = [parse_poly("2*x + 3*x^2 + 1")]
    rep = change_of_variables_check(mapping, Coset(3, 0, (0,)), Integrand([(parse_poly("x"), 1)]), 5)
    assert rep.intersect


def test_nonlinear_needs_unit_jacobian():
    with pytest.raises(ValueError):
        change_of_variables_check([parse_poly("x^2")], Coset(3, 0, (0,)), Integrand([(parse_poly("x"), 1)]), 3)
