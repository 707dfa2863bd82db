from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padiclab.radical import RadicalValue, as_radical

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=20)


def elements(p=3, m=2):
    return st.lists(fractions, min_size=m, max_size=m).map(lambda cs: RadicalValue(p, m, cs))


def mp_value(x: RadicalValue):
    with mpmath.workdps(60):
        rho = mpmath.root(mpmath.mpf(x.p), x.m)
        return sum(mpmath.mpf(c.numerator) / c.denominator * rho**j for j, c in enumerate(x.coeffs))


def test_p_power_rational_and_root():
    assert RadicalValue.p_power(3, 2) == 9
    assert RadicalValue.p_power(3, -1) == Fraction(1, 3)
    t = RadicalValue.p_power(5, Fraction(1, 2))
    assert t * t == 5
    assert not t.is_rational()


def test_mixed_root_degrees_lift():
    a = RadicalValue.p_power(7, Fraction(1, 2))
    b = RadicalValue.p_power(7, Fraction(1, 3))
    prod = a * b  # 7^(5/6)
    assert prod == RadicalValue.p_power(7, Fraction(5, 6))
    assert prod.m == 6


def test_reduced_drops_to_rational():
    t = RadicalValue.p_power(3, Fraction(1, 2))
    assert (t * t).reduced().m == 1
    assert (t * t).to_fraction() == 3


def test_sign_close_to_zero():
    # sqrt(2)-style near-miss: 1393/985 - 3^(1/2)/... keep it p-adic: 7^(1/2) ~ 2.6457513
    t = RadicalValue.p_power(7, Fraction(1, 2))
    assert (t - Fraction(26457513, 10**7)).sign() == 1
    assert (t - Fraction(26457514, 10**7)).sign() == -1


def test_decimal_and_json():
    x = RadicalValue(3, 2, [Fraction(9, 13), Fraction(1, 13)])
    assert x.decimal(6).startswith("0.825542")
    js = x.to_json()
    assert js["t"] == "3^(1/2)"
    assert js["coeffs"] == ["9/13", "1/13"]


def test_as_radical_accepts_ints_and_fractions():
    assert as_radical(2, 5) == RadicalValue.rational(5, 2)
    assert as_radical(Fraction(1, 5), 5) == RadicalValue.p_power(5, -1)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        RadicalValue.zero(3).inverse()


@settings(max_examples=60, deadline=None)
@given(elements(), elements())
def test_ring_operations_match_high_precision_float(a, b):
    with mpmath.workdps(60):
        assert abs(mp_value(a + b) - (mp_value(a) + mp_value(b))) < 1e-40
        assert abs(mp_value(a * b) - mp_value(a) * mp_value(b)) < 1e-35


@settings(max_examples=60, deadline=None)
@given(elements(5, 3))
def test_inverse(a):
    if a.is_zero():
        return
    assert a * a.inverse() == 1


@settings(max_examples=80, deadline=None)
@given(elements(), elements())
def test_ordering_agrees_with_float(a, b):
    with mpmath.workdps(60):
        da, db = mp_value(a), mp_value(b)
        if abs(da - db) > 1e-30:
            assert (a < b) == (da < db)
    assert (a == b) == (a - b).is_zero()
