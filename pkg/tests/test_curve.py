from fractions import Fraction

import pytest

from padiclab.curve import (
    FormError,
    HyperellipticCurve,
    PluricanonicalForm,
    branch_count,
    linear_combination_pseudonorm,
    pseudonorm,
    pullback_isometry_check,
    validate_form,
)
from padiclab.integrate import Coset
from padiclab.padic import valuation
from padiclab.radical import RadicalValue

P = 7
CURVE = HyperellipticCurve.from_coeffs(P, [-1, 0, 0, 0, 0, 1])
DX = PluricanonicalForm.from_coeffs(1, [1])
XDX = PluricanonicalForm.from_coeffs(1, [0, 1])


def is_square(x, p):
    v = valuation(x, p)
    if v % 2:
        return False
    u = Fraction(x) / Fraction(p) ** v
    u = u.numerator * pow(u.denominator, -1, p) % p
    return pow(u, (p - 1) // 2, p) == 1


def residue_lower_sum(h, P_fin, P_inf, h_inf, p, k):
    """Sum of 2 * |P|^(1)|h|^(-1/2) over residues where every value is resolved."""
    total = RadicalValue.zero(p)
    for x in range(p**k):
        hv, pv = h(x), P_fin(x)
        if valuation(hv, p) < k and valuation(pv, p) < k and is_square(hv, p):
            total = total + RadicalValue.p_power(p, valuation(hv, p) * Fraction(1, 2) - valuation(pv, p)) * 2
    for j in range(p ** (k - 1)):
        u = p * j
        hv, pv = h_inf(u), P_inf(u)
        if valuation(hv, p) < k and valuation(pv, p) < k and is_square(hv, p):
            total = total + RadicalValue.p_power(p, valuation(hv, p) * Fraction(1, 2) - valuation(pv, p)) * 2
    return total * Fraction(1, p**k)


def test_curve_invariants():
    assert CURVE.genus == 2
    assert CURVE.disc_valuation == 0
    # u^6 h(1/u) = u - u^6
    assert CURVE.h_at_infinity().coefficients() == [0, 1, 0, 0, 0, 0, -1]


@pytest.mark.parametrize("coeffs", [[1, 0, 1], [-1, 0, 0, 0, 1], [0, 0, 1, 1]])
def test_rejects_bad_models(coeffs):
    with pytest.raises(ValueError):
        HyperellipticCurve.from_coeffs(P, coeffs)


def test_form_validation():
    validate_form(CURVE, XDX)
    with pytest.raises(FormError):
        validate_form(CURVE, PluricanonicalForm.from_coeffs(1, [0, 0, 1]))
    validate_form(CURVE, PluricanonicalForm.from_coeffs(2, [0, 0, 1]))


@pytest.mark.parametrize("x,count", [(2, 0), (3, 2), (0, 0)])
def test_branch_count(x, count):
    # h(0) = -1 is a non-residue mod 7, h(3) = 242 = 4 mod 7 a residue
    assert branch_count(CURVE, Coset(P, 1, (x,))) == count


@pytest.mark.parametrize("form", [DX, XDX])
def test_pseudonorm_brackets_residue_oracle(form):
    res = pseudonorm(CURVE, form, 4)
    g = CURVE.genus
    oracle = residue_lower_sum(CURVE.h, form.numerator, form.at_infinity(g), CURVE.h_at_infinity(), P, 4)
    assert oracle <= res.lower
    assert res.upper is not None and res.lower <= res.upper


def test_depths_nest_and_converge():
    prev = None
    for depth in (2, 4, 6):
        res = pseudonorm(CURVE, DX, depth)
        if prev is not None:
            assert prev.lower <= res.lower and res.upper <= prev.upper
        prev = res
    assert abs(float(prev.lower) - 1.0025063) < 1e-6


def test_cut_chart_agrees():
    a = pseudonorm(CURVE, DX, 6)
    b = pseudonorm(CURVE, DX, 6, cut=1)
    assert a.intersects(b)


def test_tensor_power_homogeneity():
    # |u^2|^(1/2) = |u|, but u^2 resolves later, so the enclosures differ while agreeing
    for m2, m1 in (([1], DX), ([0, 0, 1], XDX)):
        a = pseudonorm(CURVE, PluricanonicalForm.from_coeffs(2, m2), 6)
        b = pseudonorm(CURVE, m1, 6)
        assert a.intersects(b)
        assert float(a.width()) < 1e-3


@pytest.mark.parametrize("c", [-1, 3, 7, Fraction(1, 49)])
def test_scalar_homogeneity(c):
    base = pseudonorm(CURVE, XDX, 4)
    scaled = pseudonorm(CURVE, XDX.scale(c), 4)
    assert scaled.same_enclosure(base.scaled(RadicalValue.p_power(P, -valuation(c, P))))


@pytest.mark.parametrize("b", [1, 2, -3])
def test_unimodular_translation_exact(b):
    rep = pullback_isometry_check(CURVE, XDX, 1, b, 3)
    assert rep.unimodular and rep.exact_equal


def test_non_integral_translation_intersects():
    rep = pullback_isometry_check(CURVE, DX, 1, Fraction(1, 7), 3)
    assert not rep.unimodular
    assert rep.intersect


def test_scaling_model_change_intersects_deep_enough():
    curve = HyperellipticCurve.from_coeffs(3, [-1, 0, 0, 0, 0, 1])
    rep = pullback_isometry_check(curve, PluricanonicalForm.from_coeffs(1, [1]), 3, 0, 6)
    assert rep.pulled_back.bounded and rep.intersect


@pytest.mark.parametrize("v", [(0,), (1,), (Fraction(1, 7),), (5,)])
def test_direct_and_factored_paths_agree(v):
    a = linear_combination_pseudonorm(CURVE, [DX, XDX], v, 3, "direct")
    b = linear_combination_pseudonorm(CURVE, [DX, XDX], v, 3, "factored")
    assert a.intersects(b)
