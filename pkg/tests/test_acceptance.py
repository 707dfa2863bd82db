"""Acceptance suite: one PASS/FAIL line per criterion.

Run directly with ``python tests/test_acceptance.py`` or through pytest; the
lines are printed even when pytest captures output.
"""

import sys

import pytest

from padiclab.corpus import CRITERIA, run_criterion

# criterion -> minimum number of cases the corpus must contain
EXPECTED_CASES = {1: 12, 2: 20, 3: 70, 4: 1, 5: 6, 6: 100, 7: 20, 8: 201, 9: 20, 10: 30}


def check(res):
    n = res.number
    assert res.cases >= EXPECTED_CASES[n], f"criterion {n} ran only {res.cases} cases"
    if n == 1:
        assert all(row["seconds"] < 5 for row in res.details["rows"])
    if n == 6:
        assert res.details["max_inversion_error"] <= 1e-9
        assert res.details["indicator_mismatches"] == 0
    if n == 7:
        verdicts = {(r["expect"], r["isometry"], r["equimeasure"]) for r in res.details["rows"]}
        assert verdicts == {("match", "isometry-consistent", "EQUAL"), ("broken", "isometry-violated", "NOT-EQUAL")}
    if n == 8:
        assert res.details["reference_count"] == 4
    if n == 9:
        assert res.details["seconds"] < 600
        assert all(r["count"] > 0 for r in res.details["rows"])
    assert res.passed, res.failures


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    res = run_criterion(number)
    try:
        check(res)
    except AssertionError:
        res.passed = False
        raise
    finally:
        with capsys.disabled():
            print(f"\n{res.line()} [{res.seconds:.1f}s]")


if __name__ == "__main__":
    failed = 0
    for number in sorted(CRITERIA):
        res = run_criterion(number)
        try:
            check(res)
        except AssertionError:
            res.passed = False
            failed += 1
        print(f"{res.line()} [{res.seconds:.1f}s]", flush=True)
    sys.exit(1 if failed else 0)
