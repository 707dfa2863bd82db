"""Sparse multivariate polynomials with rational coefficients.

Text format: ``"3/2*x0^2*x1 - x1^3 + 5"``.  Variables are ``x0, x1, ...``;
the aliases ``x, y, z, w`` stand for ``x0..x3``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

__all__ = ["SparsePolynomial", "parse_poly"]

_ALIASES = {"x": 0, "y": 1, "z": 2, "w": 3, "u": 0, "s": 0}
_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")


@dataclass(frozen=True)
class SparsePolynomial:
    nvars: int
    terms: tuple  # sorted ((exponents, Fraction), ...), nonzero coefficients

    def __init__(self, nvars: int, terms=()):
        acc: dict[tuple, Fraction] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent tuple {exps} does not match nvars={nvars}")
            if any(e < 0 for e in exps):
                raise ValueError("negative exponent")
            acc[exps] = acc.get(exps, Fraction(0)) + Fraction(c)
        clean = tuple(sorted((e, c) for e, c in acc.items() if c))
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    # -- constructors -------------------------------------------------
    @classmethod
    def constant(cls, nvars: int, c) -> "SparsePolynomial":
        return cls(nvars, [((0,) * nvars, c)])

    @classmethod
    def var(cls, nvars: int, i: int) -> "SparsePolynomial":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, [(tuple(e), 1)])

    @classmethod
    def univariate(cls, coeffs) -> "SparsePolynomial":
        """From coefficients listed by increasing degree."""
        return cls(1, [((i,), c) for i, c in enumerate(coeffs)])

    @classmethod
    def parse(cls, text: str, nvars: int | None = None) -> "SparsePolynomial":
        return parse_poly(text, nvars)

    @classmethod
    def from_json(cls, data) -> "SparsePolynomial":
        if isinstance(data, str):
            return parse_poly(data)
        if "poly" in data:
            return parse_poly(data["poly"], data.get("nvars"))
        return cls(data["nvars"], [(tuple(e), Fraction(str(c))) for c, e in data["terms"]])

    def to_json(self) -> dict:
        return {"nvars": self.nvars, "terms": [[str(c), list(e)] for e, c in self.terms]}

    # -- queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def as_dict(self) -> dict:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e, _ in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e, _ in self.terms}) <= 1

    def coefficients(self) -> list[Fraction]:
        """Univariate coefficient list by increasing degree."""
        if self.nvars != 1:
            raise ValueError("coefficients() is for univariate polynomials")
        out = [Fraction(0)] * (self.degree + 1)
        for (e,), c in self.terms:
            out[e] = c
        return out

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = tuple(point[0])
        total = 0
        for exps, c in self.terms:
            t = c
            for x, e in zip(point, exps):
                if e:
                    t = t * x**e
            total = total + t
        return total

    # -- arithmetic ---------------------------------------------------
    def _lift(self, other):
        if isinstance(other, SparsePolynomial):
            if other.nvars != self.nvars:
                raise ValueError("nvars mismatch")
            return other
        return SparsePolynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._lift(other)
        return SparsePolynomial(self.nvars, list(self.terms) + list(other.terms))

    __radd__ = __add__

    def __neg__(self):
        return SparsePolynomial(self.nvars, [(e, -c) for e, c in self.terms])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        acc: dict[tuple, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return SparsePolynomial(self.nvars, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = SparsePolynomial.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c) -> "SparsePolynomial":
        c = Fraction(c)
        return SparsePolynomial(self.nvars, [(e, c * v) for e, v in self.terms])

    def derivative(self, i: int) -> "SparsePolynomial":
        out = []
        for e, c in self.terms:
            if e[i]:
                d = list(e)
                d[i] -= 1
                out.append((tuple(d), c * e[i]))
        return SparsePolynomial(self.nvars, out)

    def compose(self, subs) -> "SparsePolynomial":
        """Substitute polynomial ``subs[i]`` for variable i."""
        subs = list(subs)
        if len(subs) != self.nvars:
            raise ValueError("need one substitution per variable")
        nv = subs[0].nvars
        cache: dict[tuple[int, int], SparsePolynomial] = {}

        def power(i, k):
            if (i, k) not in cache:
                cache[(i, k)] = subs[i] ** k
            return cache[(i, k)]

        total = SparsePolynomial(nv)
        for e, c in self.terms:
            t = SparsePolynomial.constant(nv, c)
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
            total = total + t
        return total

    def reversed(self, degree: int) -> "SparsePolynomial":
        """u^degree * f(1/u) for univariate f of degree <= ``degree``."""
        if self.nvars != 1:
            raise ValueError("reversed() is for univariate polynomials")
        out = []
        for (e,), c in self.terms:
            if e > degree:
                raise ValueError(f"term of degree {e} exceeds {degree}")
            out.append(((degree - e,), c))
        return SparsePolynomial(1, out)

    def integral_form(self, p: int) -> tuple[int, Fraction, "SparsePolynomial"]:
        """Write self = p^c * s * G with G integral of unit content.

        Returns ``(c, s, G)`` where ``s`` is a p-adic unit (rational) and G has
        integer coefficients with content coprime to p.
        """
        from .padic import valuation

        if self.is_zero():
            raise ValueError("zero polynomial has no content")
        c = min(valuation(v, p) for _, v in self.terms)
        scaled = self.scale(Fraction(p) ** (-c))
        L = lcm(*(v.denominator for _, v in scaled.terms))
        G = scaled.scale(L)
        return c, Fraction(1, L), G

    def integer_terms(self) -> list[tuple[tuple, int]]:
        out = []
        for e, c in self.terms:
            if c.denominator != 1:
                raise ValueError("polynomial is not integral")
            out.append((e, c.numerator))
        return out

    # -- output -------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms, key=lambda t: (-sum(t[0]), tuple(-x for x in t[0]))):
            mono = "*".join(f"x{i}" if k == 1 else f"x{i}^{k}" for i, k in enumerate(e) if k)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if mono:
                body = mono if a == 1 else f"{a}*{mono}"
            else:
                body = str(a)
            parts.append((sign, body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"SparsePolynomial({self.nvars}, {str(self)!r})"


def _var_index(name: str) -> int:
    if name in _ALIASES:
        return _ALIASES[name]
    m = re.fullmatch(r"x(\d+)", name)
    if not m:
        raise ValueError(f"unknown variable {name!r}")
    return int(m.group(1))


def parse_poly(text: str, nvars: int | None = None) -> SparsePolynomial:
    text = text.replace("**", "^").replace(" ", "")
    if not text:
        raise ValueError("empty polynomial")
    if text[0] not in "+-":
        text = "+" + text
    raw: list[tuple[dict[int, int], Fraction]] = []
    pos = 0
    for m in _TERM_RE.finditer(text):
        if m.start() != pos:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        coef = Fraction(sign)
        exps: dict[int, int] = {}
        for factor in m.group(2).split("*"):
            if not factor:
                raise ValueError(f"empty factor in {text!r}")
            if re.fullmatch(r"\d+(/\d+)?", factor):
                coef *= Fraction(factor)
                continue
            base, caret, power = factor.partition("^")
            if caret and not power.isdigit():
                raise ValueError(f"bad exponent in {factor!r}")
            i = _var_index(base)
            exps[i] = exps.get(i, 0) + (int(power) if power else 1)
        raw.append((exps, coef))
    if pos != len(text):
        raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
    used = max((max(e) for e, _ in raw if e), default=-1) + 1
    n = nvars if nvars is not None else max(used, 1)
    if used > n:
        raise ValueError(f"polynomial uses {used} variables, nvars={n}")
    terms = []
    for exps, c in raw:
        t = [0] * n
        for i, k in exps.items():
            t[i] = k
        terms.append((tuple(t), c))
    return SparsePolynomial(n, terms)
