"""Exact arithmetic in the real field Q(p^(1/m)).

Integrals of ``|f|_p^(l/m)`` type integrands take values in this field, so
keeping them exact makes the equalities we check decidable.  An element is
stored as a coefficient vector ``(c_0, ..., c_{m-1})`` in the power basis of
``rho = p^(1/m)``; ``x^m - p`` is Eisenstein at p, so the representation is
unique.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational

import mpmath
from sympy import integer_nthroot

__all__ = ["RadicalValue", "as_radical"]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _rho_bounds(p: int, m: int, bits: int) -> tuple[Fraction, Fraction]:
    """Rational bounds lo <= p^(1/m) <= hi with hi - lo = 2^-bits."""
    root, exact = integer_nthroot(p << (bits * m), m)
    lo = Fraction(int(root), 1 << bits)
    if exact:
        return lo, lo
    return lo, Fraction(int(root) + 1, 1 << bits)


class RadicalValue:
    """Element ``sum_j c_j * rho^j`` of Q(rho), rho = p^(1/m) > 0."""

    __slots__ = ("p", "m", "coeffs", "_key")

    def __init__(self, p: int, m: int, coeffs):
        if m < 1:
            raise ValueError("branch index must be positive")
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) > m:
            raise ValueError("too many coefficients for branch index")
        coeffs = coeffs + (Fraction(0),) * (m - len(coeffs))
        self.p = p
        self.m = m
        self.coeffs = coeffs
        self._key = None

    # -- constructors -------------------------------------------------
    @classmethod
    def rational(cls, p: int, value) -> "RadicalValue":
        return cls(p, 1, (Fraction(value),))

    @classmethod
    def zero(cls, p: int) -> "RadicalValue":
        return cls(p, 1, (0,))

    @classmethod
    def p_power(cls, p: int, exponent) -> "RadicalValue":
        """Exact p^exponent for a rational exponent."""
        e = Fraction(exponent)
        m = e.denominator
        q, s = divmod(e.numerator, m)
        coeffs = [Fraction(0)] * m
        coeffs[s] = Fraction(p) ** q
        return cls(p, m, coeffs)

    # -- structure ----------------------------------------------------
    def lift(self, m: int) -> "RadicalValue":
        """Same element written with branch index m (a multiple of self.m)."""
        if m == self.m:
            return self
        if m % self.m:
            raise ValueError(f"cannot lift branch {self.m} to {m}")
        step = m // self.m
        coeffs = [Fraction(0)] * m
        for j, c in enumerate(self.coeffs):
            coeffs[j * step] = c
        return RadicalValue(self.p, m, coeffs)

    def reduced(self) -> "RadicalValue":
        """Canonical form with the smallest possible branch index."""
        nz = [j for j, c in enumerate(self.coeffs) if c]
        g = self.m
        for j in nz:
            g = gcd(g, j)
        if g <= 1:
            return self
        m = self.m // g
        return RadicalValue(self.p, m, [self.coeffs[j * g] for j in range(m)])

    def _key_tuple(self):
        if self._key is None:
            r = self.reduced()
            self._key = (r.p, r.m, r.coeffs)
        return self._key

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.coeffs[0]

    def _coerce(self, other) -> tuple["RadicalValue", "RadicalValue"]:
        other = as_radical(other, self.p)
        if other.p != self.p:
            raise ValueError("radical values over different primes")
        m = _lcm(self.m, other.m)
        return self.lift(m), other.lift(m)

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, (RadicalValue, int, Rational)):
            return NotImplemented
        a, b = self._coerce(other)
        return RadicalValue(a.p, a.m, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return RadicalValue(self.p, self.m, [-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, (RadicalValue, int, Rational)):
            return NotImplemented
        return self + (-as_radical(other, self.p))

    def __rsub__(self, other):
        return as_radical(other, self.p) - self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            f = Fraction(other)
            return RadicalValue(self.p, self.m, [c * f for c in self.coeffs])
        if not isinstance(other, RadicalValue):
            return NotImplemented
        a, b = self._coerce(other)
        m, p = a.m, a.p
        out = [Fraction(0)] * m
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if not y:
                    continue
                k = i + j
                if k >= m:
                    out[k - m] += x * y * p
                else:
                    out[k] += x * y
        return RadicalValue(p, m, out)

    __rmul__ = __mul__

    def inverse(self) -> "RadicalValue":
        """Multiplicative inverse, by solving the multiplication-matrix system."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero radical value")
        a = self.reduced()
        m, p = a.m, a.p
        if m == 1:
            return RadicalValue(p, 1, (1 / a.coeffs[0],))
        # column j of the matrix = coefficients of a * rho^j
        cols = []
        for j in range(m):
            basis = [Fraction(0)] * m
            basis[j] = Fraction(1)
            cols.append((a * RadicalValue(p, m, basis)).coeffs)
        rows = [[cols[j][i] for j in range(m)] + [Fraction(int(i == 0))] for i in range(m)]
        for c in range(m):
            piv = next(r for r in range(c, m) if rows[r][c])
            rows[c], rows[piv] = rows[piv], rows[c]
            inv = 1 / rows[c][c]
            rows[c] = [x * inv for x in rows[c]]
            for r in range(m):
                if r != c and rows[r][c]:
                    f = rows[r][c]
                    rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
        return RadicalValue(p, m, [rows[i][m] for i in range(m)])

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            return self * (1 / Fraction(other))
        if not isinstance(other, RadicalValue):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_radical(other, self.p) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = RadicalValue.rational(self.p, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- ordering -----------------------------------------------------
    def enclosure(self, bits: int = 64) -> tuple[Fraction, Fraction]:
        """Certified rational interval containing the real value."""
        lo_r, hi_r = _rho_bounds(self.p, self.m, bits)
        lo = hi = self.coeffs[0]
        plo = phi = Fraction(1)
        for c in self.coeffs[1:]:
            plo *= lo_r
            phi *= hi_r
            if c > 0:
                lo += c * plo
                hi += c * phi
            elif c < 0:
                lo += c * phi
                hi += c * plo
        return lo, hi

    def sign(self) -> int:
        if self.is_zero():
            return 0
        if self.is_rational():
            return 1 if self.coeffs[0] > 0 else -1
        bits = 32
        while True:
            lo, hi = self.enclosure(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def __eq__(self, other):
        if isinstance(other, (int, Rational)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, RadicalValue):
            return NotImplemented
        return self._key_tuple() == other._key_tuple()

    def __hash__(self):
        return hash(self._key_tuple())

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- output -------------------------------------------------------
    def __float__(self):
        lo, hi = self.enclosure(64)
        return float((lo + hi) / 2)

    def to_mpf(self, dps: int = 30):
        with mpmath.workdps(dps + 10):
            rho = mpmath.root(mpmath.mpf(self.p), self.m)
            total = mpmath.mpf(0)
            for j, c in enumerate(self.coeffs):
                if c:
                    total += mpmath.mpf(c.numerator) / c.denominator * rho**j
            return +total

    def decimal(self, digits: int = 20) -> str:
        return mpmath.nstr(self.to_mpf(digits), digits)

    def __str__(self):
        r = self.reduced()
        parts = []
        for j, c in enumerate(r.coeffs):
            if not c:
                continue
            if j == 0:
                parts.append(str(c))
            elif j == 1:
                parts.append(f"{c}*t")
            else:
                parts.append(f"{c}*t^{j}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        r = self.reduced()
        return f"RadicalValue(p={r.p}, m={r.m}, {str(r)!r})"

    def to_json(self) -> dict:
        r = self.reduced()
        return {
            "exact": str(r),
            "t": f"{r.p}^(1/{r.m})",
            "coeffs": [str(c) for c in r.coeffs],
            "decimal": r.decimal(20),
        }


def as_radical(value, p: int) -> RadicalValue:
    if isinstance(value, RadicalValue):
        return value
    return RadicalValue.rational(p, value)
