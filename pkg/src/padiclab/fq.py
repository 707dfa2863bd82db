"""Finite fields F_q as integer-coded numpy arrays.

An element of F_{p^e} = F_p[t]/(m(t)) is stored as the integer
sum_i c_i p^i for c_0 + c_1 t + ... + c_(e-1) t^(e-1).  The modulus m is the
lexicographically first monic irreducible of degree e, so encodings are
deterministic.  Multiplication goes through discrete log tables.
"""

from __future__ import annotations

from itertools import product

import numpy as np
from sympy import isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

__all__ = ["FqField", "parse_field"]

_ADD_TABLE_LIMIT = 1024


def _first_irreducible(p: int, e: int) -> tuple:
    """Monic irreducible of degree e, coefficients low to high; lex order on
    (c_(e-1), ..., c_0)."""
    if e == 1:
        return (0, 1)
    for tail in product(range(p), repeat=e):
        # tail is (c_(e-1), ..., c_0), iterated lexicographically
        dense = [ZZ(1)] + [ZZ(c) for c in tail]
        if tail[-1] and gf_irreducible_p(dense, p, ZZ):
            return tuple(reversed(tail)) + (1,)
    raise ArithmeticError(f"no irreducible polynomial of degree {e} over F_{p}")


class FqField:
    def __init__(self, p: int, e: int = 1):
        if not isprime(p):
            raise ValueError(f"{p} is not prime")
        if e < 1:
            raise ValueError("extension degree must be positive")
        self.p, self.e = p, e
        self.q = p**e
        self.modulus = _first_irreducible(p, e)
        self._build_tables()

    @classmethod
    def of_order(cls, q: int) -> "FqField":
        for p in range(2, q + 1):
            if q % p == 0:
                e, r = 0, q
                while r % p == 0:
                    r //= p
                    e += 1
                if r != 1:
                    raise ValueError(f"{q} is not a prime power")
                return cls(p, e)
        raise ValueError(f"{q} is not a prime power")

    def __repr__(self):
        return f"FqField(p={self.p}, e={self.e})"

    def __eq__(self, other):
        return isinstance(other, FqField) and (self.p, self.e) == (other.p, other.e)

    def __hash__(self):
        return hash((self.p, self.e))

    # -- construction of tables ----------------------------------------
    def _digits(self, x: int) -> list[int]:
        return [(x // self.p**i) % self.p for i in range(self.e)]

    def _encode(self, digits) -> int:
        return sum(int(c) * self.p**i for i, c in enumerate(digits))

    def _poly_mul(self, a: int, b: int) -> int:
        p, e, m = self.p, self.e, self.modulus
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k]
            if c:
                for i in range(e + 1):
                    prod[k - e + i] = (prod[k - e + i] - c * m[i]) % p
        return self._encode(prod[:e])

    def _build_tables(self):
        q, p = self.q, self.p
        codes = np.arange(q, dtype=np.int64)
        self._digit_arr = np.stack([(codes // p**i) % p for i in range(self.e)])
        self._pows = np.array([p**i for i in range(self.e)], dtype=np.int64)
        order = q - 1
        factors = [f for f in range(2, order + 1) if order % f == 0 and isprime(f)]
        for g in range(2, q) if q > 2 else [1]:
            if all(self._slow_pow(g, order // f) != 1 for f in factors):
                break
        self.generator = g
        exp = np.zeros(2 * order, dtype=np.int64)
        x = 1
        for i in range(order):
            exp[i] = x
            x = self._poly_mul(x, g)
        exp[order:] = exp[:order]
        log = np.full(q, -1, dtype=np.int64)
        log[exp[:order]] = np.arange(order)
        self._exp, self._log = exp, log
        if q == p:
            self._add_table = None
        elif q <= _ADD_TABLE_LIMIT:
            self._add_table = self._digit_add(codes[:, None], codes[None, :])
        else:
            self._add_table = None
        self._neg = self._digit_neg(codes)

    def _slow_pow(self, a: int, k: int) -> int:
        out, base = 1, a
        while k:
            if k & 1:
                out = self._poly_mul(out, base)
            base = self._poly_mul(base, base)
            k >>= 1
        return out

    def _digit_add(self, a, b):
        p = self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for w in self._pows:
            out += ((a // w % p + b // w % p) % p) * w
        return out

    def _digit_neg(self, a):
        p = self.p
        out = np.zeros(np.shape(a), dtype=np.int64)
        for w in self._pows:
            out += ((-(a // w % p)) % p) * w
        return out

    # -- vectorized arithmetic -----------------------------------------
    def add(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.q == self.p:
            return (a + b) % self.p
        if self._add_table is not None:
            return self._add_table[a, b]
        return self._digit_add(a, b)

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.q == self.p:
            return (-a) % self.p
        return self._neg[a]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.q == self.p:
            return a * b % self.p
        la, lb = self._log[a], self._log[b]
        out = self._exp[np.where((la < 0) | (lb < 0), 0, la + lb)]
        return np.where((la < 0) | (lb < 0), 0, out)

    def power(self, a, k: int):
        a = np.asarray(a, dtype=np.int64)
        if k == 0:
            return np.ones_like(a)
        la = self._log[a]
        out = self._exp[np.where(la < 0, 0, la * k % (self.q - 1))]
        return np.where(la < 0, 0, out)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        la = self._log[a]
        if np.any(la < 0):
            raise ZeroDivisionError("inverse of zero in F_q")
        return self._exp[(self.q - 1 - la) % (self.q - 1)]

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_p -> F_q."""
        return int(n) % self.p

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def element_str(self, a: int) -> str:
        if self.e == 1:
            return str(int(a))
        ds = self._digits(int(a))
        parts = [f"{c}" if i == 0 else f"{c}*t" if i == 1 else f"{c}*t^{i}" for i, c in enumerate(ds) if c]
        return " + ".join(parts) or "0"

    # -- extensions ----------------------------------------------------
    def extension(self, s: int) -> tuple["FqField", np.ndarray]:
        """F_(q^s) and the embedding of self into it, as a lookup array."""
        big = FqField(self.p, self.e * s)
        if self.e == 1:
            return big, np.arange(self.p, dtype=np.int64)
        # image of t: a root of the modulus in the big field
        m = self.modulus
        elems = big.elements()
        val = np.zeros_like(elems)
        for c in reversed(m):
            val = big.add(big.mul(val, elems), big.from_int(c))
        roots = elems[val == 0]
        if roots.size == 0:
            raise ArithmeticError("modulus has no root in the extension")
        t = int(roots[0])
        emb = np.zeros(self.q, dtype=np.int64)
        tp = [1]
        for _ in range(1, self.e):
            tp.append(int(big.mul(tp[-1], t)))
        for a in range(self.q):
            acc = 0
            for c, w in zip(self._digits(a), tp):
                if c:
                    acc = int(big.add(acc, big.mul(c, w)))
            emb[a] = acc
        return big, emb


def parse_field(text: str) -> FqField:
    """``"p^e"``, ``"p**e"`` or a prime power ``"q"``."""
    text = text.replace("**", "^").strip()
    if "^" in text:
        p, e = text.split("^")
        return FqField(int(p), int(e))
    return FqField.of_order(int(text))
