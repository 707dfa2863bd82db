"""Q_p elements at finite relative precision, for odd primes p."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from sympy import isprime

from .radical import RadicalValue

__all__ = [
    "PAdicContext",
    "PAdicNumber",
    "PrecisionError",
    "BinomialSum",
    "valuation",
    "unit_part",
    "padic_abs",
    "hensel_sqrt",
    "binomial_series",
    "binomial",
    "check_exponent",
]


class PrecisionError(ArithmeticError):
    """An operation cancelled every known digit."""


def valuation(x, p: int) -> float | int:
    """Exact p-adic valuation of a rational; ``inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return float("inf")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(x, p: int) -> Fraction:
    """x / p^v(x) for nonzero rational x."""
    x = Fraction(x)
    v = valuation(x, p)
    return x / Fraction(p) ** v


def check_exponent(r, p: int) -> Fraction:
    r = Fraction(r)
    if r.denominator % p == 0:
        raise ValueError(f"exponent {r}: denominator divisible by p={p} is unsupported")
    return r


@dataclass(frozen=True)
class PAdicContext:
    p: int
    precision: int = 20

    def __post_init__(self):
        if self.p < 3 or not isprime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.precision < 1:
            raise ValueError("precision must be positive")

    @property
    def modulus(self) -> int:
        return self.p**self.precision

    def __call__(self, x) -> "PAdicNumber":
        return PAdicNumber.from_rational(self, x)


@dataclass(frozen=True)
class PAdicNumber:
    """``p^valuation * unit``, with ``unit`` known modulo ``p^relprec``.

    ``valuation is None`` encodes the exact zero.
    """

    context: PAdicContext
    valuation: int | None
    unit: int = 0
    relprec: int = 0

    @classmethod
    def from_rational(cls, ctx: PAdicContext, x) -> "PAdicNumber":
        x = Fraction(x)
        if x == 0:
            return cls(ctx, None)
        p, N = ctx.p, ctx.precision
        v = valuation(x, p)
        u = unit_part(x, p)
        mod = p**N
        unit = u.numerator * pow(u.denominator, -1, mod) % mod
        return cls(ctx, v, unit, N)

    @classmethod
    def zero(cls, ctx: PAdicContext) -> "PAdicNumber":
        return cls(ctx, None)

    @property
    def is_zero(self) -> bool:
        return self.valuation is None

    @property
    def p(self) -> int:
        return self.context.p

    def abs(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.p) ** (-self.valuation)

    def to_fraction(self) -> Fraction:
        """The representative p^v * unit (unit in [0, p^relprec))."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.p) ** self.valuation * self.unit

    @property
    def absprec(self) -> float | int:
        return float("inf") if self.is_zero else self.valuation + self.relprec

    def _coerce(self, other) -> "PAdicNumber":
        if isinstance(other, PAdicNumber):
            if other.context.p != self.context.p:
                raise ValueError("mixing different primes")
            return other
        return PAdicNumber.from_rational(self.context, other)

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        p = self.p
        A = min(self.absprec, other.absprec)
        w = min(self.valuation, other.valuation)
        s = (self.unit * p ** (self.valuation - w) + other.unit * p ** (other.valuation - w)) % p ** (A - w)
        if s == 0:
            raise PrecisionError("sum cancels to zero at working precision")
        k = 0
        while s % p == 0:
            s //= p
            k += 1
        rel = min(A - w - k, self.context.precision)
        return PAdicNumber(self.context, w + k, s % p**rel, rel)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero:
            return self
        return PAdicNumber(self.context, self.valuation, (-self.unit) % self.p**self.relprec, self.relprec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            return PAdicNumber.zero(self.context)
        rel = min(self.relprec, other.relprec)
        mod = self.p**rel
        return PAdicNumber(self.context, self.valuation + other.valuation, self.unit * other.unit % mod, rel)

    __rmul__ = __mul__

    def inverse(self) -> "PAdicNumber":
        if self.is_zero:
            raise ZeroDivisionError("inverse of p-adic zero")
        mod = self.p**self.relprec
        return PAdicNumber(self.context, -self.valuation, pow(self.unit, -1, mod), self.relprec)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def congruent(self, other, absprec: int | None = None) -> bool:
        """Equality modulo p^absprec (defaults to the joint known precision)."""
        other = self._coerce(other)
        A = min(self.absprec, other.absprec)
        if absprec is not None:
            A = min(A, absprec)
        diff = self.to_fraction() - other.to_fraction()
        return valuation(diff, self.p) >= A

    def __repr__(self):
        if self.is_zero:
            return f"PAdicNumber(0, p={self.p})"
        return f"PAdicNumber({self.p}^{self.valuation} * {self.unit} mod {self.p}^{self.relprec})"


def padic_abs(x: PAdicNumber, r=1) -> RadicalValue:
    """|x|_p^r as an exact element of Q(p^(1/m)), m the denominator of r."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError("exponent must be positive")
    check_exponent(r, x.p)
    if x.is_zero:
        return RadicalValue.zero(x.p)
    return RadicalValue.p_power(x.p, -x.valuation * r)


def _sqrt_mod_p(u: int, p: int) -> int | None:
    u %= p
    if pow(u, (p - 1) // 2, p) != 1:
        return None
    # smallest root; p is small in every use here
    for y in range(1, p):
        if y * y % p == u:
            return y
    return None


def hensel_sqrt(a: PAdicNumber) -> PAdicNumber | None:
    """Square root congruent to the least residue root mod p, or None."""
    if a.is_zero:
        raise ValueError("hensel_sqrt needs a nonzero argument")
    if a.valuation % 2:
        return None
    p, N = a.p, a.relprec
    y = _sqrt_mod_p(a.unit, p)
    if y is None:
        return None
    k = 1
    while k < N:
        k = min(2 * k, N)
        mod = p**k
        y = (y - (y * y - a.unit) * pow(2 * y, -1, mod)) % mod
    return PAdicNumber(a.context, a.valuation // 2, y % p**N, N)


def binomial(r, j: int) -> Fraction:
    out = Fraction(1)
    r = Fraction(r)
    for i in range(j):
        out = out * (r - i) / (i + 1)
    return out


class BinomialSum(NamedTuple):
    value: PAdicNumber
    tail_valuation: float | int


def binomial_series(r, sigma: PAdicNumber, terms: int) -> BinomialSum:
    """Partial sum of (1 + sigma)^r = sum_j C(r, j) sigma^j, first ``terms`` terms.

    The tail has valuation at least ``terms * v(sigma)`` (infinite when r is a
    non-negative integer below ``terms``).
    """
    r = Fraction(r)
    p = sigma.p
    check_exponent(r, p)
    if sigma.is_zero:
        return BinomialSum(PAdicNumber.from_rational(sigma.context, 1), float("inf"))
    if sigma.valuation < 1:
        raise ValueError("binomial series needs |sigma|_p < 1")
    s = sigma.to_fraction()
    total = Fraction(0)
    power = Fraction(1)
    for j in range(terms):
        total += binomial(r, j) * power
        power *= s
    if r.denominator == 1 and 0 <= r < terms:
        tail = float("inf")
    else:
        tail = terms * sigma.valuation
    ctx = sigma.context
    known = min(tail, sigma.absprec, ctx.precision)
    value = PAdicNumber.from_rational(ctx, total)
    if not value.is_zero and known < value.valuation + value.relprec:
        rel = max(int(known) - value.valuation, 0)
        if rel == 0:
            raise PrecisionError("too few terms to determine any digit")
        value = PAdicNumber(ctx, value.valuation, value.unit % p**rel, rel)
    return BinomialSum(value, tail)
