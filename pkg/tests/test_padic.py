from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padiclab.padic import (
    PAdicContext,
    PAdicNumber,
    PrecisionError,
    binomial,
    binomial_series,
    check_exponent,
    hensel_sqrt,
    padic_abs,
    unit_part,
    valuation,
)
from padiclab.radical import RadicalValue

ctx5 = PAdicContext(5, 12)
nonzero = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**4).filter(lambda x: x != 0)


@pytest.mark.parametrize(
    "x,p,v",
    [(12, 2, 2), (Fraction(1, 9), 3, -2), (50, 5, 2), (7, 3, 0), (Fraction(-3, 25), 5, -2)],
)
def test_valuation(x, p, v):
    assert valuation(x, p) == v


def test_valuation_of_zero_is_infinite():
    assert valuation(0, 7) == float("inf")


def test_unit_part():
    assert unit_part(Fraction(18, 5), 3) == Fraction(2, 5)


@pytest.mark.parametrize("p", [1, 2, 4, 9])
def test_context_rejects_bad_primes(p):
    with pytest.raises(ValueError):
        PAdicContext(p)


def test_check_exponent():
    assert check_exponent(Fraction(1, 2), 3) == Fraction(1, 2)
    with pytest.raises(ValueError):
        check_exponent(Fraction(1, 3), 3)


@settings(max_examples=100, deadline=None)
@given(nonzero, nonzero)
def test_arithmetic_agrees_with_rationals(a, b):
    x, y = ctx5(a), ctx5(b)
    # congruence to the joint precision is the contract
    assert (x * y).congruent(a * b)
    assert (x / y).congruent(a / b)
    if a + b != 0 and valuation(a + b, 5) < min(valuation(a, 5), valuation(b, 5)) + 8:
        assert (x + y).congruent(a + b)


def test_cancellation_raises():
    with pytest.raises(PrecisionError):
        ctx5(3) - ctx5(3 + 5**20)


def test_precision_tracks_cancellation():
    s = ctx5(1) + ctx5(5**6 - 1)
    assert s.valuation == 6
    assert s.relprec == 6


def test_padic_abs_radical():
    assert padic_abs(ctx5(Fraction(1, 25)), Fraction(1, 2)) == RadicalValue.p_power(5, 1)
    assert padic_abs(ctx5(10), 1) == Fraction(1, 5)


@pytest.mark.parametrize("a", [4, 6, 11, 14, 16 * 25, Fraction(1, 4)])
def test_hensel_sqrt_squares_back(a):
    x = ctx5(a)
    y = hensel_sqrt(x)
    assert y is not None
    assert (y * y).congruent(x)


@pytest.mark.parametrize("a", [2, 3, 5, 10, 7 * 25])
def test_hensel_sqrt_non_squares(a):
    assert hensel_sqrt(ctx5(a)) is None


def test_binomial_coefficients():
    assert binomial(5, 2) == 10
    assert binomial(Fraction(1, 2), 2) == Fraction(-1, 8)


@pytest.mark.parametrize("r", [2, 3, 5])
def test_binomial_series_exact_for_integer_r(r):
    s = ctx5(5)
    out = binomial_series(r, s, r + 1)
    assert out.tail_valuation == float("inf")
    assert out.value.congruent(Fraction(6) ** r)


def test_binomial_series_square_root():
    # (1 + 5*7)^(1/2) = 6
    out = binomial_series(Fraction(1, 2), ctx5(35), 10)
    assert out.tail_valuation == 10
    assert out.value.congruent(6)


def test_binomial_series_needs_small_sigma():
    with pytest.raises(ValueError):
        binomial_series(Fraction(1, 2), ctx5(2), 5)


def test_zero_is_exact():
    z = PAdicNumber.zero(ctx5)
    assert z.is_zero and z.abs() == 0
    assert (z + ctx5(3)).congruent(3)
