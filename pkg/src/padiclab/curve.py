"""Pseudonorms of pluricanonical forms on odd-degree hyperelliptic curves.

The curve ``y^2 = h(x)`` over Q_p is pushed down to the x-line: each x with
h(x) a nonzero square carries the two points (x, +-y).  Two charts cover it:

* finite chart, x in p^-cut Z_p, written x = s / p^cut with s in Z_p;
* infinite chart, u = 1/x in p^(cut+1) Z_p, with w = u^(g+1) y and
  w^2 = u^(2g+2) h(1/u).

On the finite chart ``P(x) (dx/y)^m`` has density ``|P|^(1/m) |h|^(-1/2)``; on
the infinite chart it becomes ``+-P~(u) (du/w)^m`` with
``P~(u) = sum_i P_i u^(m(g-1)-i)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy import Poly, Rational, discriminant, gcd, symbols

from .integrate import Coset, Integrand, IntegralResult, _eval_int, _legendre, _val, integrate
from .padic import PAdicContext, valuation
from .poly import SparsePolynomial

__all__ = [
    "FormError",
    "HyperellipticCurve",
    "PluricanonicalForm",
    "Chart",
    "validate_form",
    "build_charts",
    "branch_count",
    "pseudonorm",
    "linear_combination_pseudonorm",
    "affine_model_change",
    "pullback_form",
    "pullback_isometry_check",
    "PullbackReport",
]

_X = symbols("x")


class FormError(ValueError):
    """The form is not a global section (negative local valuation)."""


def _to_sympy(f: SparsePolynomial) -> Poly:
    return Poly([Rational(c.numerator, c.denominator) for c in reversed(f.coefficients())], _X)


@dataclass(frozen=True)
class HyperellipticCurve:
    context: PAdicContext
    h: SparsePolynomial

    def __post_init__(self):
        h = self.h
        if h.nvars != 1:
            raise ValueError("h must be univariate")
        d = h.degree
        if d < 3 or d % 2 == 0:
            raise ValueError(f"h must have odd degree >= 3, got {d}")
        ph = _to_sympy(h)
        if gcd(ph, ph.diff(_X)).degree() > 0:
            raise ValueError("h is not squarefree")

    @classmethod
    def from_coeffs(cls, p: int, coeffs, precision: int = 20) -> "HyperellipticCurve":
        return cls(PAdicContext(p, precision), SparsePolynomial.univariate(coeffs))

    @property
    def p(self) -> int:
        return self.context.p

    @property
    def genus(self) -> int:
        return (self.h.degree - 1) // 2

    @property
    def disc_valuation(self) -> int:
        d = discriminant(_to_sympy(self.h))
        return int(valuation(Fraction(int(d.p), int(d.q)), self.p))

    def h_at_infinity(self) -> SparsePolynomial:
        """u^(2g+2) h(1/u)."""
        return self.h.reversed(2 * self.genus + 2)

    def to_json(self) -> dict:
        return {"p": self.p, "precision": self.context.precision, "h": [str(c) for c in self.h.coefficients()]}


@dataclass(frozen=True)
class PluricanonicalForm:
    """``numerator(x) * (dx/y)^m``."""

    m: int
    numerator: SparsePolynomial

    @classmethod
    def from_coeffs(cls, m: int, coeffs) -> "PluricanonicalForm":
        return cls(m, SparsePolynomial.univariate(coeffs))

    def scale(self, c) -> "PluricanonicalForm":
        return PluricanonicalForm(self.m, self.numerator.scale(c))

    def __add__(self, other: "PluricanonicalForm") -> "PluricanonicalForm":
        if other.m != self.m:
            raise ValueError("forms have different tensor powers")
        return PluricanonicalForm(self.m, self.numerator + other.numerator)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def at_infinity(self, genus: int) -> SparsePolynomial:
        return self.numerator.reversed(self.m * (genus - 1))


@dataclass(frozen=True)
class Chart:
    name: str
    domain: tuple
    integrand: Integrand
    branch_rule: SparsePolynomial


def validate_form(curve: HyperellipticCurve, form: PluricanonicalForm) -> dict:
    """Local valuations of the form along the curve; raises FormError if any is negative.

    (dx/y) is regular and nonvanishing at every finite point, so only the
    point at infinity can obstruct: there ``x^i (dx/y)^m`` has order
    ``2(m(g-1) - i)`` in the uniformizer w.
    """
    if form.m < 1:
        raise FormError("tensor power must be positive")
    if form.numerator.nvars != 1:
        raise FormError("numerator must be univariate")
    g = curve.genus
    exps = {e[0]: form.m * (g - 1) - e[0] for e, _ in form.numerator.terms}
    bad = {i: k for i, k in exps.items() if k < 0}
    if bad:
        i = max(bad)
        raise FormError(
            f"x^{i}(dx/y)^{form.m} has exponent {bad[i]} at infinity (order {2 * bad[i]}); not a global section"
        )
    order_inf = 2 * min(exps.values()) if exps else None
    return {"infinite_chart_exponents": exps, "order_at_infinity": order_inf}


def build_charts(curve: HyperellipticCurve, form: PluricanonicalForm, cut: int = 0) -> list[Chart]:
    validate_form(curve, form)
    p, g, m = curve.p, curve.genus, form.m
    scale = Fraction(1, p**cut)
    s_sub = [SparsePolynomial.univariate([0, scale])]
    h_fin = curve.h.compose(s_sub)
    P_fin = form.numerator.compose(s_sub) if not form.is_zero() else form.numerator
    finite = Chart(
        "finite",
        (Coset(p, 0, (0,)),),
        Integrand([(P_fin, Fraction(1, m)), (h_fin, Fraction(-1, 2))], Fraction(p**cut), branch=1),
        h_fin,
    )
    h_inf = curve.h_at_infinity()
    P_inf = form.at_infinity(g) if not form.is_zero() else form.numerator
    infinite = Chart(
        "infinite",
        (Coset(p, cut + 1, (0,)),),
        Integrand([(P_inf, Fraction(1, m)), (h_inf, Fraction(-1, 2))], 1, branch=1),
        h_inf,
    )
    return [finite, infinite]


def branch_count(curve: HyperellipticCurve, coset: Coset, chart: str = "finite") -> int:
    """Number of curve points over each x in a coset resolved for h: 0 or 2."""
    p = curve.p
    h = curve.h if chart == "finite" else curve.h_at_infinity()
    c, s, G = h.integral_form(p)
    value = _eval_int(G.integer_terms(), coset.center)
    v = _val(value, p)
    if v >= coset.level:
        raise ValueError(f"coset {coset} is not resolved for h; subdivide deeper")
    if (c + v) % 2:
        return 0
    unit = value // p**v
    smod = s.numerator * pow(s.denominator, -1, p) % p
    return 2 if _legendre(unit * smod, p) == 1 else 0


def pseudonorm(curve: HyperellipticCurve, form: PluricanonicalForm, depth: int = 6, cut: int = 0) -> IntegralResult:
    """Certified enclosure of the m-th pseudonorm of ``form``."""
    validate_form(curve, form)
    if form.is_zero():
        return IntegralResult.zero(curve.p, depth)
    total = None
    for chart in build_charts(curve, form, cut):
        res = integrate(chart.integrand, chart.domain, depth, p=curve.p)
        total = res if total is None else total + res
    return total


def _combination(forms: Sequence[PluricanonicalForm], v: Sequence) -> PluricanonicalForm:
    if len(v) != len(forms) - 1:
        raise ValueError("need one coefficient per form after the first")
    m = forms[0].m
    if any(f.m != m for f in forms):
        raise ValueError("forms must share m")
    out = forms[0]
    for c, f in zip(v, forms[1:]):
        out = out + f.scale(c)
    return out


def linear_combination_pseudonorm(
    curve: HyperellipticCurve,
    forms: Sequence[PluricanonicalForm],
    v: Sequence,
    depth: int = 6,
    path: str = "direct",
) -> IntegralResult:
    """Pseudonorm of eta_0 + sum v_i eta_i.

    ``path="factored"`` integrates |1 + sum v_i f_i|^(1/m), f_i = eta_i/eta_0,
    against the measure of eta_0: the integrand carries |eta_0|^(1/m),
    |eta_0 + sum v_i eta_i|^(1/m) and |eta_0|^(-1/m) as separate factors,
    which the integrator cancels.
    """
    combo = _combination(forms, v)
    if path == "direct":
        return pseudonorm(curve, combo, depth)
    if path != "factored":
        raise ValueError(f"unknown path {path!r}")
    if forms[0].is_zero():
        raise ValueError("eta_0 must be nonzero")
    validate_form(curve, combo)
    if combo.is_zero():
        return IntegralResult.zero(curve.p, depth)
    m = forms[0].m
    r = Fraction(1, m)
    total = None
    for base, chart in zip(build_charts(curve, forms[0]), build_charts(curve, combo)):
        P0 = base.integrand.factors[0][0]
        Q = chart.integrand.factors[0][0]
        h = base.integrand.factors[1][0]
        integrand = Integrand([(P0, r), (h, Fraction(-1, 2)), (Q, r), (P0, -r)], base.integrand.constant, branch=1)
        res = integrate(integrand, base.domain, depth, p=curve.p)
        total = res if total is None else total + res
    return total


def affine_model_change(curve: HyperellipticCurve, a, b) -> HyperellipticCurve:
    """The model y^2 = h(a x + b), mapping to ``curve`` by x -> a x + b."""
    a, b = Fraction(a), Fraction(b)
    if a == 0:
        raise ValueError("a must be nonzero")
    sub = [SparsePolynomial.univariate([b, a])]
    return HyperellipticCurve(curve.context, curve.h.compose(sub))


def pullback_form(form: PluricanonicalForm, a, b) -> PluricanonicalForm:
    """f*(P(x)(dx/y)^m) = a^m P(a x + b) (dx/y)^m for f(x, y) = (a x + b, y)."""
    a, b = Fraction(a), Fraction(b)
    sub = [SparsePolynomial.univariate([b, a])]
    return PluricanonicalForm(form.m, form.numerator.compose(sub).scale(a**form.m))


@dataclass
class PullbackReport:
    original: IntegralResult
    pulled_back: IntegralResult
    intersect: bool
    exact_equal: bool
    unimodular: bool

    def to_json(self) -> dict:
        return {
            "original": self.original.to_json(),
            "pulled_back": self.pulled_back.to_json(),
            "intersect": self.intersect,
            "exact_equal": self.exact_equal,
            "unimodular": self.unimodular,
        }


def pullback_isometry_check(
    curve: HyperellipticCurve, form: PluricanonicalForm, a, b, depth: int = 4
) -> PullbackReport:
    """Pseudonorm of ``form`` against that of its pullback along x -> a x + b."""
    other = affine_model_change(curve, a, b)
    left = pseudonorm(curve, form, depth)
    right = pseudonorm(other, pullback_form(form, a, b), depth)
    p = curve.p
    unimodular = valuation(Fraction(a), p) == 0 and valuation(Fraction(b), p) >= 0
    return PullbackReport(left, right, left.intersects(right), left.same_enclosure(right), unimodular)
