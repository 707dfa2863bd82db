from itertools import product

import numpy as np
import pytest

from padiclab.fq import FqField, parse_field

SMALL = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (7, 2)]


def irreducible_by_trial_division(p, coeffs):
    """Irreducibility by trial division by every monic polynomial of degree <= e/2."""
    e = len(coeffs) - 1

    def rem(a, b):
        a = list(a)
        while len(a) >= len(b):
            c = a[-1]
            if c:
                for i in range(len(b)):
                    a[len(a) - len(b) + i] = (a[len(a) - len(b) + i] - c * b[i]) % p
            a.pop()
        return a

    for k in range(1, e // 2 + 1):
        for tail in product(range(p), repeat=k):
            if not any(rem(coeffs, list(tail) + [1])):
                return False
    return True


@pytest.mark.parametrize("p,e", SMALL)
def test_modulus_is_lex_first_irreducible(p, e):
    F = FqField(p, e)
    m = F.modulus
    assert len(m) == e + 1 and m[-1] == 1
    if e == 1:
        return
    assert irreducible_by_trial_division(p, list(m))
    # no monic polynomial earlier in (c_(e-1), ..., c_0) order is irreducible
    for tail in product(range(p), repeat=e):
        cand = list(reversed(tail)) + [1]
        if tuple(cand) == m:
            break
        assert cand[0] == 0 or not irreducible_by_trial_division(p, cand)


@pytest.mark.parametrize("p,e", SMALL)
def test_field_axioms_exhaustive(p, e):
    F = FqField(p, e)
    q = F.q
    a = F.elements()
    A, B = np.meshgrid(a, a, indexing="ij")
    S, P = F.add(A, B), F.mul(A, B)
    assert np.array_equal(S, S.T) and np.array_equal(P, P.T)
    assert np.array_equal(F.add(a, 0), a) and np.array_equal(F.mul(a, 1), a)
    assert np.all(F.add(a, F.neg(a)) == 0)
    nz = a[1:]
    assert np.all(F.mul(nz, F.inv(nz)) == 1)
    # every row of the multiplication table on nonzero elements is a permutation
    assert all(len(set(row)) == q - 1 for row in P[1:, 1:])
    rng = np.random.default_rng(q)
    x, y, z = (rng.integers(0, q, 500) for _ in range(3))
    assert np.array_equal(F.add(F.add(x, y), z), F.add(x, F.add(y, z)))
    assert np.array_equal(F.mul(F.mul(x, y), z), F.mul(x, F.mul(y, z)))
    assert np.array_equal(F.mul(x, F.add(y, z)), F.add(F.mul(x, y), F.mul(x, z)))


@pytest.mark.parametrize("p,e", [(3, 2), (2, 4), (7, 1)])
def test_frobenius_and_power(p, e):
    F = FqField(p, e)
    a = F.elements()
    assert np.array_equal(F.power(a, F.q), a)
    frob = F.power(a, p)
    assert np.array_equal(F.power(F.add(a, 1), p), F.add(frob, 1))
    assert len(set(frob.tolist())) == F.q


def test_characteristic_in_addition():
    F = FqField(3, 2)
    x = F.elements()
    acc = np.zeros_like(x)
    for _ in range(3):
        acc = F.add(acc, x)
    assert np.all(acc == 0)


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        FqField(5).inv(0)


@pytest.mark.parametrize("p,e,s", [(2, 1, 2), (3, 1, 2), (2, 2, 2), (3, 2, 2), (2, 2, 3)])
def test_extension_is_a_ring_embedding(p, e, s):
    F = FqField(p, e)
    big, emb = F.extension(s)
    assert big.q == F.q**s
    assert len(set(emb.tolist())) == F.q
    a = F.elements()
    A, B = np.meshgrid(a, a, indexing="ij")
    assert np.array_equal(emb[F.add(A, B)], big.add(emb[A], emb[B]))
    assert np.array_equal(emb[F.mul(A, B)], big.mul(emb[A], emb[B]))


@pytest.mark.parametrize("text,q", [("5", 5), ("3^2", 9), ("2**3", 8), ("49", 49)])
def test_parse_field(text, q):
    assert parse_field(text).q == q


@pytest.mark.parametrize("bad", ["6", "1", "12"])
def test_parse_field_rejects_non_prime_powers(bad):
    with pytest.raises(ValueError):
        parse_field(bad)


def test_element_str():
    F = FqField(3, 2)
    assert F.element_str(0) == "0"
    assert F.element_str(5) == "2 + 1*t"
