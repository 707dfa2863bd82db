from fractions import Fraction

import pytest

from padiclab.curve import HyperellipticCurve, PluricanonicalForm, affine_model_change, pseudonorm, pullback_form
from padiclab.equimeasure import (
    Setup,
    StepMeasure,
    equimeasurable_compare,
    isometry_scan,
    pushforward,
    sample_grid,
)
from padiclab.radical import RadicalValue

P = 7
CURVE = HyperellipticCurve.from_coeffs(P, [-1, 0, 0, 0, 0, 1])
FORMS = [PluricanonicalForm.from_coeffs(1, [1]), PluricanonicalForm.from_coeffs(1, [0, 1])]


def rv(x):
    return RadicalValue.rational(P, x)


@pytest.fixture(scope="module")
def base_measure():
    return pushforward(CURVE, FORMS, 1, 1)


def test_sample_grid_size():
    grid = sample_grid(7, 1, 1)
    assert len(grid) == 49
    assert grid[8] == (Fraction(8, 7),)
    assert len(sample_grid(3, 2, 1)) == 81


def test_total_mass_matches_pseudonorm(base_measure):
    lo, hi = base_measure.total()
    ref = pseudonorm(CURVE, FORMS[0], base_measure.meta["source_depth"])
    assert lo <= ref.upper and ref.lower <= hi


def test_entries_are_depth_cosets(base_measure):
    # F = x restricted to |x| <= 7: centers are j/7 for 0 <= j < 49
    for (c,) in base_measure.entries:
        assert 0 <= c * 7 < 49 and (c * 7).denominator == 1


def test_overflow_is_the_region_beyond_window(base_measure):
    # |x| > 7 carries the infinite-chart mass and part of |x| = 7^2, ...
    lo, hi = base_measure.overflow_enclosure()
    assert lo > 0


def test_self_comparison_equal(base_measure):
    rep = equimeasurable_compare(base_measure, base_measure)
    assert rep.equal and rep.max_gap == 0 and rep.witness is None


def test_scaled_measure_not_equal(base_measure):
    rep = equimeasurable_compare(base_measure, base_measure.scaled(Fraction(1, 7)))
    assert not rep.equal
    assert rep.max_gap > 0


def test_synthetic_measures():
    z = rv(0)
    a = StepMeasure(7, 1, 1, 0, {(0,): (rv(1), rv(1))}, (z, z))
    b = StepMeasure(7, 1, 1, 0, {(0,): (rv(Fraction(1, 2)), rv(Fraction(3, 4)))}, (z, z))
    rep = equimeasurable_compare(a, b)
    assert rep.witness == (0,)
    assert rep.max_gap == Fraction(1, 4)
    loose = StepMeasure(7, 1, 1, 0, {(0,): (rv(Fraction(1, 2)), rv(Fraction(3, 4)))}, (z, z), (z, rv(1)))
    assert equimeasurable_compare(a, loose).equal


def test_mismatched_resolution_rejected(base_measure):
    other = pushforward(CURVE, FORMS, 2, 1)
    with pytest.raises(ValueError):
        equimeasurable_compare(base_measure, other)


def test_model_change_equimeasurable():
    other = affine_model_change(CURVE, 1, 3)
    pulled = [pullback_form(f, 1, 3) for f in FORMS]
    a = pushforward(CURVE, FORMS, 2, 1)
    b = pushforward(other, pulled, 2, 1)
    assert equimeasurable_compare(a, b).equal
    scan = isometry_scan(Setup(CURVE, FORMS), Setup(other, pulled), sample_grid(7, 1, 1), 2)
    assert scan.consistent and len(scan.samples) == 49


def test_swapped_forms_detected():
    swapped = Setup(CURVE, FORMS[::-1])
    scan = isometry_scan(Setup(CURVE, FORMS), swapped, [(0,), (1,)], 2, stop_early=True)
    assert not scan.consistent and scan.first_failure == (0,)


def test_rejects_zero_base_form():
    with pytest.raises(ValueError):
        pushforward(CURVE, [PluricanonicalForm.from_coeffs(1, [0]), FORMS[1]], 1, 1)
