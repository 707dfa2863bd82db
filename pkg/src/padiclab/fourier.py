"""Fourier transforms of compactly supported step functions on Q_p, and the
nonvanishing witness built from shifted powers of |.|_p.

Character: psi(x) = exp(2 pi i {x}_p).  The transform is
f^(tau) = int f(s) psi(-tau s) ds with Haar measure normalized on Z_p.
Transforms are returned as exact ``PhaseSum``s: finite sums of
coefficient * exp(2 pi i q) with q rational in [0, 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .integrate import Coset, reduce_center, stratum_closed_form
from .padic import check_exponent, valuation
from .radical import RadicalValue

__all__ = [
    "phase_frac",
    "PhaseSum",
    "StepFunction",
    "fourier_step",
    "transform_as_step",
    "inverse_at",
    "WitnessFunction",
    "witness_construct",
    "witness_verify",
    "WitnessReport",
    "witness_transform",
    "witness_step_function",
    "fourier_nonvanish",
    "NonvanishReport",
]


def phase_frac(x, p: int) -> Fraction:
    """The p-adic fractional part {x}_p in [0, 1) of a rational x."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    v = valuation(x, p)
    if v >= 0:
        return Fraction(0)
    q = p ** (-v)
    # x = n / (q * d) with p not dividing d; {x}_p = (n * d^-1 mod q) / q
    d = x.denominator // q
    return Fraction(x.numerator * pow(d, -1, q) % q, q)


def _to_mp(c):
    if isinstance(c, RadicalValue):
        return c.to_mpf()
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpmathify(c)


class PhaseSum:
    """sum_q coef_q * exp(2 pi i q), keyed by q in [0, 1)."""

    def __init__(self, terms=None):
        self.terms: dict = {}
        for q, c in (terms or {}).items():
            self.add(q, c)

    def add(self, q, c):
        q = Fraction(q) % 1
        if q in self.terms:
            c = self.terms[q] + c
        if c == 0:
            self.terms.pop(q, None)
        else:
            self.terms[q] = c

    def __add__(self, other: "PhaseSum") -> "PhaseSum":
        out = PhaseSum(self.terms)
        for q, c in other.terms.items():
            out.add(q, c)
        return out

    def scale(self, c) -> "PhaseSum":
        return PhaseSum({q: v * c for q, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def to_complex(self, dps: int = 30) -> mpmath.mpc:
        with mpmath.workdps(dps):
            total = mpmath.mpc(0)
            for q, c in self.terms.items():
                total += _to_mp(c) * mpmath.expjpi(2 * (mpmath.mpf(q.numerator) / q.denominator))
            return +total

    def __repr__(self):
        return f"PhaseSum({self.terms!r})"


def _disjoint(c1: Coset, c2: Coset) -> bool:
    a, b = (c1, c2) if c1.level <= c2.level else (c2, c1)
    return not a.contains(b.center)


@dataclass(frozen=True)
class StepFunction:
    """Finite sum of value * 1_{c + p^k Z_p} over pairwise disjoint cosets."""

    p: int
    pieces: tuple  # ((Coset, value), ...)

    def __init__(self, p: int, pieces: Iterable):
        pieces = tuple((c if isinstance(c, Coset) else Coset(p, c[1], (Fraction(c[0]),)), v) for c, v in pieces)
        for i in range(len(pieces)):
            if pieces[i][0].dimension != 1:
                raise ValueError("step functions are on Q_p")
            for j in range(i):
                if not _disjoint(pieces[i][0], pieces[j][0]):
                    raise ValueError(f"cosets {pieces[i][0]} and {pieces[j][0]} overlap")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "pieces", pieces)

    def __call__(self, s):
        s = Fraction(s)
        for c, v in self.pieces:
            if c.contains((s,)):
                return v
        return 0

    def pullback_affine(self, a, b=0) -> "StepFunction":
        """s -> f(a s + b)."""
        a, b = Fraction(a), Fraction(b)
        k = valuation(a, self.p)
        out = []
        for c, v in self.pieces:
            out.append((Coset(self.p, c.level - k, ((c.center[0] - b) / a,)), v))
        return StepFunction(self.p, out)

    def scale(self, c) -> "StepFunction":
        return StepFunction(self.p, [(cs, v * c) for cs, v in self.pieces])


def fourier_step(f: StepFunction, tau, sign: int = -1) -> PhaseSum:
    """int f(s) psi(sign * tau * s) ds, exactly.

    The integral of psi(sign tau s) over c + p^k Z_p is p^-k psi(sign tau c)
    when |tau| <= p^k and 0 otherwise.
    """
    tau = Fraction(tau)
    p = f.p
    vt = valuation(tau, p)
    out = PhaseSum()
    for c, v in f.pieces:
        if vt + c.level >= 0:
            mass = Fraction(p) ** (-c.level)
            out.add(phase_frac(sign * tau * c.center[0], p), v * (float(mass) if isinstance(v, complex) else mass))
    return out


def transform_as_step(f: StepFunction, dps: int = 30) -> StepFunction:
    """f^ as a step function with complex values.

    If f is supported in p^-R Z_p and constant on cosets of p^K Z_p, f^ is
    supported in p^-K Z_p and constant on cosets of p^R Z_p.
    """
    p = f.p
    if not f.pieces:
        return StepFunction(p, [])
    R = max(max(-c.level, -valuation(c.center[0], p)) for c, _ in f.pieces)
    K = max(c.level for c, _ in f.pieces)
    out = []
    for j in range(p ** (K + R)):
        tau = j / Fraction(p) ** K
        val = complex(fourier_step(f, tau).to_complex(dps))
        if abs(val) > 0:
            out.append((Coset(p, R, (reduce_center(tau, R, p),)), val))
    return StepFunction(p, out)


def inverse_at(fhat: StepFunction, s) -> complex:
    """int fhat(tau) psi(tau s) dtau."""
    return complex(fourier_step(fhat, s, sign=+1).to_complex())


# -- witness ----------------------------------------------------------------


@dataclass(frozen=True)
class WitnessFunction:
    """f(s) = sum_k a_k |1 + c_k s|^r, which vanishes for |s| > p^R."""

    p: int
    r: Fraction
    terms: tuple  # ((a RadicalValue, c Fraction), ...)
    support_exponent: int

    @property
    def support_radius(self) -> Fraction:
        return Fraction(self.p) ** self.support_exponent

    def __call__(self, s) -> RadicalValue:
        s = Fraction(s)
        total = RadicalValue.zero(self.p)
        for a, c in self.terms:
            x = 1 + c * s
            if x != 0:
                total = total + a * RadicalValue.p_power(self.p, -valuation(x, self.p) * self.r)
        return total

    def constraint_sum(self) -> RadicalValue:
        """sum a_k |c_k|^r; zero exactly when f has compact support."""
        total = RadicalValue.zero(self.p)
        for a, c in self.terms:
            total = total + a * RadicalValue.p_power(self.p, -valuation(c, self.p) * self.r)
        return total

    def dilate(self, lam) -> "WitnessFunction":
        """s -> |lam| f(lam s), whose transform at tau is f^(tau / lam)."""
        lam = Fraction(lam)
        k = valuation(lam, self.p)
        absl = Fraction(self.p) ** (-k)
        return WitnessFunction(
            self.p,
            self.r,
            tuple((a * absl, c * lam) for a, c in self.terms),
            self.support_exponent + k,
        )

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "r": str(self.r),
            "terms": [{"a": a.to_json(), "c": str(c)} for a, c in self.terms],
            "support_radius": str(self.support_radius),
        }


def witness_construct(p: int, r) -> WitnessFunction:
    """f(s) = |1 + s|^r - p^r |1 + p s|^r, compactly supported in p^-1 Z_p."""
    r = check_exponent(r, p)
    if r <= 0:
        raise ValueError("r must be positive")
    one = RadicalValue.rational(p, 1)
    w = WitnessFunction(p, r, ((one, Fraction(1)), (-RadicalValue.p_power(p, r), Fraction(p))), 1)
    if not w.constraint_sum().is_zero():
        raise AssertionError("witness coefficients fail the support constraint")
    return w


@dataclass
class WitnessReport:
    ok: bool
    constraint_sum: RadicalValue
    outside_checked: int
    outside_failures: list
    inside_nonzero: int

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "constraint_sum": self.constraint_sum.to_json(),
            "outside_checked": self.outside_checked,
            "outside_failures": [str(s) for s in self.outside_failures],
            "inside_nonzero": self.inside_nonzero,
        }


def witness_verify(w: WitnessFunction, samples: int = 200, extra_levels: int = 3) -> WitnessReport:
    """Exact check that f vanishes on sampled s with |s| > p^R and is nonzero inside."""
    p, R = w.p, w.support_exponent
    outside, failures = 0, []
    k = 0
    while outside < samples:
        k += 1
        if k % p == 0:
            continue
        # cycle through the levels R+1, ..., R+extra_levels
        s = Fraction(k, p ** (R + 1 + outside % extra_levels))
        outside += 1
        if not w(s).is_zero():
            failures.append(s)
    inside = sum(1 for j in range(p ** (R + 2)) if not w(Fraction(j, p**R)).is_zero())
    c = w.constraint_sum()
    return WitnessReport(c.is_zero() and not failures and inside > 0, c, outside, failures, inside)


def _ball_integral(p: int, r: Fraction, R: int, tau: Fraction) -> RadicalValue:
    """int over p^-R Z_p of |z|^r psi(-tau z) dz.

    The shell |z| = p^-k contributes (1 - 1/p) p^-k(1+r) when |tau| <= p^k,
    -p^-(k+1) p^-kr when |tau| = p^(k+1), and nothing otherwise.
    """
    if tau == 0:
        return stratum_closed_form(p, r, -R)
    e = -valuation(tau, p)
    total = stratum_closed_form(p, r, max(-R, e))
    if e - 1 >= -R:
        k = e - 1
        total = total - RadicalValue.p_power(p, -(k + 1) - k * r)
    return total


def witness_transform(w: WitnessFunction, tau) -> PhaseSum:
    """Exact f^(tau): sum_k a_k |c_k|^-1 int |z|^r psi(-tau (z - 1) / c_k) dz
    over the ball p^-R' Z_p, R' = R - v(c_k) >= 0, which contains z = 1."""
    tau = Fraction(tau)
    p = w.p
    out = PhaseSum()
    for a, c in w.terms:
        vc = valuation(c, p)
        radius = w.support_exponent - vc
        if radius < 0:
            raise ValueError("the image ball of a term must contain 0")
        J = _ball_integral(p, w.r, radius, tau / c)
        coef = a * J * Fraction(p) ** vc
        out.add(phase_frac(tau / c, p), coef)
    return out


def witness_step_function(w: WitnessFunction, depth: int):
    """Step approximation of f on cosets of p^depth Z_p, and an L^1 error bound.

    Cosets where some 1 + c_k s is not resolved are set to 0; their
    contribution to the error is at most mass * sum |a_k| sup|1 + c_k s|^r.
    """
    p, R, r = w.p, w.support_exponent, w.r
    pieces = []
    err = RadicalValue.zero(p)
    mass = Fraction(1, p**depth)
    for j in range(p ** (R + depth)):
        s = Fraction(j, p**R)
        resolved = True
        bound = RadicalValue.zero(p)
        for a, c in w.terms:
            x = 1 + c * s
            floor = depth + valuation(c, p)
            vx = valuation(x, p)
            if vx >= floor:
                resolved = False
                bound = bound + abs(a) * RadicalValue.p_power(p, -floor * r)
            else:
                bound = bound + abs(a) * RadicalValue.p_power(p, -vx * r)
        if resolved:
            val = w(s)
            if not val.is_zero():
                pieces.append((Coset(p, depth, (s,)), val))
        else:
            err = err + bound * mass
    return StepFunction(p, pieces), err


@dataclass
class NonvanishReport:
    tau0: Fraction | None
    value: complex | None
    magnitude: float | None
    at_zero: bool
    dilation_checks: list
    step_crosscheck: dict | None

    @property
    def ok(self) -> bool:
        return self.tau0 is not None and self.at_zero and all(c["ok"] for c in self.dilation_checks)

    def to_json(self) -> dict:
        return {
            "tau0": None if self.tau0 is None else str(self.tau0),
            "value": None if self.value is None else [self.value.real, self.value.imag],
            "magnitude": self.magnitude,
            "transform_at_zero_vanishes": self.at_zero,
            "dilation_checks": self.dilation_checks,
            "step_crosscheck": self.step_crosscheck,
        }


def fourier_nonvanish(
    w: WitnessFunction,
    window: int = 2,
    depth: int = 4,
    threshold: float = 1e-6,
    dilations: Sequence | None = None,
    tol: float = 1e-9,
) -> NonvanishReport:
    """First tau0 = j p^-A with |f^(tau0)| > threshold, plus dilation checks.

    f^ is constant on cosets of p^R Z_p, so tau = j p^-A, 0 < j < p^(A+R),
    covers the window |tau| <= p^A.
    """
    p, R, A = w.p, w.support_exponent, window
    at_zero = witness_transform(w, 0).is_zero()
    tau0, value = None, None
    for j in range(1, p ** (A + R)):
        tau = Fraction(j, p**A)
        z = complex(witness_transform(w, tau).to_complex())
        if abs(z) > threshold:
            tau0, value = tau, z
            break
    checks = []
    cross = None
    if tau0 is not None:
        for lam in dilations if dilations is not None else (p, Fraction(1, p), 2):
            lam = Fraction(lam)
            lhs = complex(witness_transform(w.dilate(lam), lam * tau0).to_complex())
            checks.append(
                {"lambda": str(lam), "tau": str(lam * tau0), "value": [lhs.real, lhs.imag], "ok": abs(lhs - value) <= tol}
            )
        step, err = witness_step_function(w, depth)
        approx = complex(fourier_step(step, tau0).to_complex())
        bound = float(err)
        cross = {
            "depth": depth,
            "approx": [approx.real, approx.imag],
            "error_bound": bound,
            "ok": abs(approx - value) <= bound + tol,
        }
    return NonvanishReport(tau0, value, None if value is None else abs(value), at_zero, checks, cross)
