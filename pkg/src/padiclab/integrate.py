"""Certified p-adic integration over residue classes of Z_p^n.

A coset ``a + p^t Z_p^n`` is *resolved* for an integral polynomial F when
``v_p(F(a)) < t``: then ``|F|_p`` is constant on the coset.  The integrator
subdivides unresolved cosets down to a depth cap; what remains at the cap is
either bounded above (positive exponents), integrated exactly through the
Hensel tail rule (one univariate factor with negative exponent), or reported
as unbounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Iterable, Iterator, NamedTuple, Sequence

from .padic import check_exponent, valuation
from .poly import SparsePolynomial
from .radical import RadicalValue, as_radical

__all__ = [
    "Coset",
    "Integrand",
    "IntegralResult",
    "ChangeOfVariablesReport",
    "CosetAssessor",
    "integrate",
    "change_of_variables_check",
    "zero_locus_mass",
    "reduce_center",
    "whole_space",
    "stratum_closed_form",
    "power_sum",
]

INF = float("inf")


def reduce_center(c, level: int, p: int) -> Fraction:
    """Canonical representative of c + p^level Z_p, for c in Z_(p)[1/p].

    The representative is ``n / p^J`` with ``0 <= n < p^(level + J)``.
    """
    c = Fraction(c)
    den = c.denominator
    J = 0
    while den % p == 0:
        den //= p
        J += 1
    if level + J <= 0:
        return Fraction(0)
    mod = p ** (level + J)
    n = c.numerator * pow(den, -1, mod) % mod
    return Fraction(n, p**J)


@dataclass(frozen=True)
class Coset:
    """The residue class ``center + p^level Z_p^n``."""

    p: int
    level: int
    center: tuple

    def __post_init__(self):
        cen = tuple(reduce_center(c, self.level, self.p) for c in self.center)
        cen = tuple(int(c) if c.denominator == 1 else c for c in cen)
        object.__setattr__(self, "center", cen)

    @property
    def dimension(self) -> int:
        return len(self.center)

    @property
    def mass(self) -> Fraction:
        return Fraction(self.p) ** (-self.dimension * self.level)

    def children(self) -> Iterator["Coset"]:
        if self.level >= 0 and all(isinstance(c, int) for c in self.center):
            # integer centers stay canonical: c + p^t d < p^(t+1)
            step = self.p**self.level
            for digits in product(range(self.p), repeat=self.dimension):
                child = object.__new__(Coset)
                object.__setattr__(child, "p", self.p)
                object.__setattr__(child, "level", self.level + 1)
                object.__setattr__(child, "center", tuple(c + step * d for c, d in zip(self.center, digits)))
                yield child
            return
        step = Fraction(self.p) ** self.level
        for digits in product(range(self.p), repeat=self.dimension):
            yield Coset(self.p, self.level + 1, tuple(c + step * d for c, d in zip(self.center, digits)))

    def contains(self, point) -> bool:
        return all(valuation(Fraction(x) - c, self.p) >= self.level for x, c in zip(point, self.center))

    def to_json(self) -> dict:
        return {"level": self.level, "center": [str(c) for c in self.center]}


def whole_space(p: int, n: int) -> list[Coset]:
    return [Coset(p, 0, (0,) * n)]


def _val(x: int, p: int) -> float | int:
    if x == 0:
        return INF
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _eval_int(terms, point) -> int:
    total = 0
    for exps, c in terms:
        t = c
        for x, e in zip(point, exps):
            if e:
                t *= x**e
        total += t
    return total


def _legendre(u: int, p: int) -> int:
    return 1 if pow(u % p, (p - 1) // 2, p) == 1 else -1


def power_sum(p: int, counts: dict) -> RadicalValue:
    """Exact value of sum(count * p^exponent) over a dict exponent -> count."""
    if not counts:
        return RadicalValue.zero(p)
    M = lcm(*(Fraction(e).denominator for e in counts))
    coeffs = [Fraction(0)] * M
    for e, cnt in counts.items():
        e = Fraction(e)
        q, s = divmod(e.numerator * (M // e.denominator), M)
        coeffs[s] += cnt * Fraction(p) ** q
    return RadicalValue(p, M, coeffs)


def stratum_closed_form(p: int, r, start: int = 0, step: int = 1) -> RadicalValue | None:
    """sum over k >= start, k = start mod step, of (p^-k - p^-k-1) * p^(-k r).

    This is the integral of |z|^r over the shells v(z) = k; None when divergent.
    """
    r = Fraction(r)
    if 1 + r <= 0:
        return None
    one = RadicalValue.rational(p, 1)
    head = RadicalValue.p_power(p, -start * (1 + r)) * (1 - Fraction(1, p))
    return head / (one - RadicalValue.p_power(p, -step * (1 + r)))


@dataclass(frozen=True)
class Integrand:
    """``constant * prod_i |F_i|_p^{r_i}``, optionally weighted by a square class.

    ``branch`` names the factor whose square class gives the weight: 2 where
    its value is a nonzero square in Q_p, 0 elsewhere.
    """

    factors: tuple
    constant: object = 1
    branch: int | None = None

    def __init__(self, factors: Iterable, constant=1, branch: int | None = None):
        fs = tuple((f, Fraction(r)) for f, r in factors)
        if fs:
            n = fs[0][0].nvars
            if any(f.nvars != n for f, _ in fs):
                raise ValueError("factors must share the number of variables")
        if any(r == 0 for _, r in fs):
            raise ValueError("factor exponents must be nonzero")
        if branch is not None and not 0 <= branch < len(fs):
            raise ValueError("branch index out of range")
        object.__setattr__(self, "factors", fs)
        object.__setattr__(self, "constant", constant)
        object.__setattr__(self, "branch", branch)

    @property
    def nvars(self) -> int:
        return self.factors[0][0].nvars if self.factors else 0

    def with_constant(self, c) -> "Integrand":
        return Integrand(self.factors, c, self.branch)

    def compose(self, subs) -> "Integrand":
        return Integrand([(f.compose(subs), r) for f, r in self.factors], self.constant, self.branch)


class _Factor(NamedTuple):
    terms: list            # integer terms of the unit-content integral form G
    deriv: list | None     # integer terms of G' (univariate only)
    r: Fraction
    shift: int             # content valuation c of the original factor
    unit_mod_p: int        # unit part of the scale s, reduced mod p


@dataclass
class IntegralResult:
    lower: RadicalValue
    upper: RadicalValue | None  # None: unbounded
    unresolved_mass: Fraction
    depth: int
    resolved_cosets: int = 0

    @property
    def bounded(self) -> bool:
        return self.upper is not None

    @property
    def p(self) -> int:
        return self.lower.p

    def width(self) -> RadicalValue | None:
        return None if self.upper is None else self.upper - self.lower

    def is_exact(self) -> bool:
        return self.upper is not None and self.upper == self.lower

    def contains(self, value) -> bool:
        value = as_radical(value, self.p)
        return self.lower <= value and (self.upper is None or value <= self.upper)

    def intersects(self, other: "IntegralResult") -> bool:
        if self.upper is not None and self.upper < other.lower:
            return False
        if other.upper is not None and other.upper < self.lower:
            return False
        return True

    def same_enclosure(self, other: "IntegralResult") -> bool:
        return self.lower == other.lower and self.upper == other.upper

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        up = None if self.upper is None or other.upper is None else self.upper + other.upper
        return IntegralResult(
            self.lower + other.lower,
            up,
            self.unresolved_mass + other.unresolved_mass,
            max(self.depth, other.depth),
            self.resolved_cosets + other.resolved_cosets,
        )

    def scaled(self, c) -> "IntegralResult":
        c = as_radical(c, self.p)
        if c < 0:
            raise ValueError("scale factor must be non-negative")
        up = None if self.upper is None else self.upper * c
        return IntegralResult(self.lower * c, up, self.unresolved_mass, self.depth, self.resolved_cosets)

    @classmethod
    def zero(cls, p: int, depth: int = 0) -> "IntegralResult":
        z = RadicalValue.zero(p)
        return cls(z, z, Fraction(0), depth, 0)

    def to_json(self) -> dict:
        return {
            "lower": self.lower.to_json(),
            "upper": None if self.upper is None else self.upper.to_json(),
            "unbounded": self.upper is None,
            "exact": self.is_exact(),
            "unresolved_mass": str(self.unresolved_mass),
            "depth": self.depth,
            "resolved_cosets": self.resolved_cosets,
        }


class Assessment(NamedTuple):
    kind: str                  # "resolved" | "exact" | "bounded" | "unbounded" | "split"
    exponent: Fraction | None  # resolved: value is weight * p^exponent * constant
    weight: int
    lo: RadicalValue | None    # exact/bounded, already including the constant
    hi: RadicalValue | None
    values: tuple              # G_i(center) for each factor


class CosetAssessor:
    """Decides, coset by coset, what an integrand contributes."""

    def __init__(self, integrand: Integrand, p: int):
        self.p = p
        self.n = integrand.nvars
        self.zero = False
        const = as_radical(integrand.constant, p)
        if const < 0:
            raise ValueError("integrand constant must be positive")
        merged: list[list] = []
        for idx, (f, r) in enumerate(integrand.factors):
            check_exponent(r, p)
            if f.is_zero():
                if r < 0:
                    raise ValueError("zero factor with negative exponent")
                self.zero = True
                continue
            c, s, G = f.integral_form(p)
            is_branch = idx == integrand.branch
            if not is_branch:
                for slot in merged:
                    if not slot[5] and slot[0] == G:
                        slot[1] += r
                        slot[2] += c * r
                        break
                else:
                    merged.append([G, r, c * r, c, s, False])
                continue
            merged.append([G, r, c * r, c, s, True])
        self.factors: list[_Factor] = []
        self.branch: int | None = None
        scale_exp = Fraction(0)
        for G, r, cr, c, s, is_branch in merged:
            scale_exp += cr
            if r == 0 and not is_branch:
                continue
            if is_branch:
                self.branch = len(self.factors)
            deriv = G.derivative(0).integer_terms() if self.n == 1 else None
            unit_mod = s.numerator * pow(s.denominator, -1, p) % p
            self.factors.append(_Factor(G.integer_terms(), deriv, Fraction(r), c, unit_mod))
        self.constant = const * RadicalValue.p_power(p, -scale_exp)
        self.any_negative = any(f.r < 0 for f in self.factors)

    def branch_weight(self, value: int, v: int) -> int:
        """Weight 2 when p^shift * s * value is a nonzero square, else 0."""
        f = self.factors[self.branch]
        if (f.shift + v) % 2:
            return 0
        u = value // self.p**v
        return 2 if _legendre(u * f.unit_mod_p, self.p) == 1 else 0

    def assess(self, level: int, center: Sequence[int], at_cap: bool) -> Assessment:
        p, t = self.p, level
        vals = tuple(_eval_int(f.terms, center) for f in self.factors)
        vs = [_val(x, p) for x in vals]
        unresolved = [i for i, v in enumerate(vs) if v >= t]
        if not unresolved:
            return self._resolved(t, vs, vals)
        if not at_cap:
            return Assessment("split", None, 0, None, None, vals)
        return self._cap(t, center, vs, vals, unresolved)

    def _resolved(self, t, vs, vals) -> Assessment:
        weight = 1
        if self.branch is not None:
            weight = self.branch_weight(vals[self.branch], vs[self.branch])
        exponent = -sum(v * f.r for v, f in zip(vs, self.factors)) - self.n * t
        return Assessment("resolved", exponent, weight, None, None, vals)

    def _cap(self, t, center, vs, vals, unresolved) -> Assessment:
        p = self.p
        negative = [i for i in unresolved if self.factors[i].r < 0]
        if len(negative) > 1 or (negative and self.n != 1):
            return Assessment("unbounded", None, 0, None, None, vals)
        tail = None
        if negative:
            j = negative[0]
            f = self.factors[j]
            delta = _val(_eval_int(f.deriv, center), p)
            if delta >= t:
                return Assessment("unbounded", None, 0, None, None, vals)
            if vs[j] < t + delta:
                # |F_j| is constant on the coset; so is its square class
                vs = list(vs)
                unresolved = [i for i in unresolved if i != j]
                if not unresolved:
                    return self._resolved(t, vs, vals)
            else:
                if j == self.branch:
                    # shells k >= t with shift + delta + k even carry weight 2 * 1/2
                    start = t if (f.shift + delta + t) % 2 == 0 else t + 1
                    series = stratum_closed_form(p, f.r, start, 2)
                else:
                    series = stratum_closed_form(p, f.r, t, 1)
                if series is None:
                    return Assessment("unbounded", None, 0, None, None, vals)
                tail = series * RadicalValue.p_power(p, -delta * f.r)
                unresolved = [i for i in unresolved if i != j]
        # everything left in ``unresolved`` has positive exponent
        exp_fixed = Fraction(0)
        exp_sup = Fraction(0)
        for i, (v, f) in enumerate(zip(vs, self.factors)):
            if i in unresolved:
                exp_sup -= t * f.r
            elif tail is None or i != negative[0]:
                exp_fixed -= v * f.r
        if self.branch is not None and self.branch not in unresolved and (tail is None or self.branch != negative[0]):
            weight = self.branch_weight(vals[self.branch], vs[self.branch])
        elif self.branch is not None and self.branch in unresolved:
            weight = 2
        else:
            weight = 1
        if tail is not None:
            base = tail * RadicalValue.p_power(p, exp_fixed) * weight * self.constant
            if not unresolved:
                return Assessment("exact", None, 0, base, base, vals)
            hi = base * RadicalValue.p_power(p, exp_sup)
            return Assessment("bounded", None, 0, RadicalValue.zero(p), hi, vals)
        hi = RadicalValue.p_power(p, exp_fixed + exp_sup - self.n * t) * weight * self.constant
        return Assessment("bounded", None, 0, RadicalValue.zero(p), hi, vals)


class _Accumulator:
    def __init__(self, p: int):
        self.p = p
        self.counts: dict[Fraction, int] = {}
        self.extra_lo: list[RadicalValue] = []
        self.extra_hi: list[RadicalValue] = []
        self.unbounded = False
        self.unresolved_mass = Fraction(0)
        self.resolved = 0

    def add(self, a: Assessment, level: int, n: int) -> None:
        if a.kind == "resolved":
            self.resolved += 1
            if a.weight:
                self.counts[a.exponent] = self.counts.get(a.exponent, 0) + a.weight
        elif a.kind == "exact":
            self.resolved += 1
            self.extra_lo.append(a.lo)
            self.extra_hi.append(a.hi)
        elif a.kind == "bounded":
            self.unresolved_mass += Fraction(self.p) ** (-n * level)
            self.extra_hi.append(a.hi)
        elif a.kind == "unbounded":
            self.unresolved_mass += Fraction(self.p) ** (-n * level)
            self.unbounded = True

    def result(self, constant: RadicalValue, depth: int) -> IntegralResult:
        base = power_sum(self.p, self.counts) * constant
        lo = base
        for x in self.extra_lo:
            lo = lo + x
        hi = None
        if not self.unbounded:
            hi = base
            for x in self.extra_hi:
                hi = hi + x
        return IntegralResult(lo, hi, self.unresolved_mass, depth, self.resolved)


def walk(assessor: CosetAssessor, region: Iterable[Coset], depth: int) -> Iterator[tuple[Coset, Assessment]]:
    """Depth-first, lexicographic traversal yielding every terminal coset."""
    stack = list(reversed(list(region)))
    while stack:
        coset = stack.pop()
        if coset.level > depth:
            raise ValueError(f"coset level {coset.level} exceeds depth {depth}")
        a = assessor.assess(coset.level, coset.center, coset.level == depth)
        if a.kind == "split":
            stack.extend(reversed(list(coset.children())))
        else:
            yield coset, a


def integrate(integrand: Integrand, region: Iterable[Coset] | None = None, depth: int = 6, *, p: int) -> IntegralResult:
    """Certified enclosure of the integral of ``integrand`` over ``region``.

    ``region`` defaults to Z_p^n.  Haar measure gives Z_p^n mass 1.
    """
    if region is None:
        region = whole_space(p, max(integrand.nvars, 1))
    region = list(region)
    assessor = CosetAssessor(integrand, p)
    if assessor.zero:
        return IntegralResult.zero(p, depth)
    n = max(assessor.n, region[0].dimension if region else 1)
    if assessor.n == 0:
        assessor.n = n
    acc = _Accumulator(p)
    for coset, a in walk(assessor, region, depth):
        acc.add(a, coset.level, n)
    return acc.result(assessor.constant, depth)


def zero_locus_mass(poly: SparsePolynomial, depth: int, *, p: int) -> Fraction:
    """Haar mass of the depth-level cosets on which v_p(poly) >= depth."""
    if poly.is_zero():
        raise ValueError("zero polynomial")
    res = integrate(Integrand([(poly, 1)]), None, depth, p=p)
    return res.unresolved_mass


# -- change of variables ----------------------------------------------------


@dataclass
class ChangeOfVariablesReport:
    left: IntegralResult
    right: IntegralResult
    intersect: bool
    exact_equal: bool
    jacobian_valuation: int
    affine: bool
    image: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "left": self.left.to_json(),
            "right": self.right.to_json(),
            "intersect": self.intersect,
            "exact_equal": self.exact_equal,
            "jacobian_valuation": self.jacobian_valuation,
            "affine": self.affine,
            "image": [c.to_json() for c in self.image],
        }


def _det(matrix):
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = matrix[0][j] * _det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def _is_p_integral(poly: SparsePolynomial, p: int) -> bool:
    return all(valuation(c, p) >= 0 for _, c in poly.terms)


def change_of_variables_check(
    mapping: Sequence[SparsePolynomial],
    region: Coset,
    integrand: Integrand,
    depth: int,
) -> ChangeOfVariablesReport:
    """Compare the integral of h over phi(U) with that of (h o phi)|det J| over U."""
    p = region.p
    n = region.dimension
    mapping = list(mapping)
    if len(mapping) != n or any(f.nvars != n for f in mapping):
        raise ValueError("map must have n components in n variables")
    if not all(_is_p_integral(f, p) for f in mapping):
        raise ValueError("map coefficients must be p-integral")
    jac = [[f.derivative(j) for j in range(n)] for f in mapping]
    det = _det(jac)
    affine = all(f.degree <= 1 for f in mapping)
    if affine:
        dval = det(*([0] * n)) if not det.is_zero() else 0
        k = valuation(dval, p)
        if k == INF:
            raise ValueError("map is not invertible")
        k = int(k)
        A = [[row[j](*([0] * n)) for j in range(n)] for row in jac]
        image_center = [f(*region.center) for f in mapping]
        step = Fraction(p) ** region.level
        seen = {}
        for y in product(range(p**k), repeat=n):
            c = tuple(ic + step * sum(A[i][j] * y[j] for j in range(n)) for i, ic in enumerate(image_center))
            cs = Coset(p, region.level + k, c)
            seen.setdefault(cs.center, cs)
        image = [seen[key] for key in sorted(seen)]
        jac_const = RadicalValue.p_power(p, -k)
    else:
        k = 0
        pieces = [region] if region.level >= 1 else list(region.children())
        image = []
        for piece in pieces:
            d = det(*piece.center)
            if valuation(d, p) != 0:
                raise ValueError(f"Jacobian is not a unit on {piece}; cannot certify at depth {depth}")
            image.append(Coset(p, piece.level, tuple(f(*piece.center) for f in mapping)))
        if len({c.center for c in image}) != len(image):
            raise ValueError("map is not injective modulo p on the region")
        image.sort(key=lambda c: c.center)
        jac_const = RadicalValue.rational(p, 1)
    left = integrate(integrand, image, depth + k, p=p)
    pulled = integrand.compose(mapping)
    pulled = pulled.with_constant(as_radical(integrand.constant, p) * jac_const)
    right = integrate(pulled, [region], depth, p=p)
    exact = left.same_enclosure(right) and left.unresolved_mass == right.unresolved_mass * Fraction(p) ** (-k)
    return ChangeOfVariablesReport(left, right, left.intersects(right), exact, k, affine, image)
