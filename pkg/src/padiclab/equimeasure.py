"""Pushforward step measures, isometry scans and equimeasurability checks.

For forms eta_0..eta_N on a curve, F = (eta_1/eta_0, ..., eta_N/eta_0) pushes
the measure <eta_0>^(1/m) forward to Q_p^N.  We tabulate it on the cosets of
p^D Z_p^N inside the window |u_i| <= p^A; everything else is overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .curve import HyperellipticCurve, PluricanonicalForm, build_charts, linear_combination_pseudonorm, validate_form
from .integrate import CosetAssessor, _eval_int, _val, power_sum, reduce_center, walk
from .padic import valuation
from .radical import RadicalValue

__all__ = [
    "Setup",
    "StepMeasure",
    "pushforward",
    "isometry_scan",
    "IsometryReport",
    "equimeasurable_compare",
    "CompareReport",
    "sample_grid",
]

INF = float("inf")


@dataclass(frozen=True)
class Setup:
    curve: HyperellipticCurve
    forms: tuple

    def __init__(self, curve: HyperellipticCurve, forms: Sequence[PluricanonicalForm]):
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "forms", tuple(forms))


class _Mass:
    """Running exact lower/upper mass, with an unbounded flag."""

    __slots__ = ("counts", "lo", "hi", "unbounded")

    def __init__(self):
        self.counts: dict = {}
        self.lo: list = []
        self.hi: list = []
        self.unbounded = False

    def add_resolved(self, exponent, weight):
        if weight:
            self.counts[exponent] = self.counts.get(exponent, 0) + weight

    def add(self, lo, hi):
        if lo is not None:
            self.lo.append(lo)
        if hi is None:
            self.unbounded = True
        else:
            self.hi.append(hi)

    def enclosure(self, p: int, constant: RadicalValue):
        base = power_sum(p, self.counts) * constant
        lo = base
        for x in self.lo:
            lo = lo + x
        if self.unbounded:
            return lo, None
        hi = base
        for x in self.hi:
            hi = hi + x
        return lo, hi


def _sum_pair(a, b):
    lo = a[0] + b[0]
    hi = None if a[1] is None or b[1] is None else a[1] + b[1]
    return lo, hi


@dataclass
class StepMeasure:
    """Coset table of a measure on Q_p^n at depth D within the window |u| <= p^A.

    ``entries`` holds enclosures of mass assigned with certainty to each coset
    (keyed by the canonical center); ``unassigned`` is mass whose image coset
    was not determined by the depth cap and may land anywhere.
    """

    p: int
    dimension: int
    depth: int
    window: int
    entries: dict
    overflow: tuple
    unassigned: tuple = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.unassigned is None:
            z = RadicalValue.zero(self.p)
            self.unassigned = (z, z)

    def _pad(self, enc):
        lo, hi = enc
        uhi = self.unassigned[1]
        if hi is None or uhi is None:
            return lo, None
        return lo, hi + uhi

    def enclosure(self, key) -> tuple:
        z = RadicalValue.zero(self.p)
        return self._pad(self.entries.get(tuple(key), (z, z)))

    def overflow_enclosure(self) -> tuple:
        return self._pad(self.overflow)

    def total(self) -> tuple:
        z = RadicalValue.zero(self.p)
        acc = (z, z)
        for enc in self.entries.values():
            acc = _sum_pair(acc, enc)
        acc = _sum_pair(acc, self.overflow)
        return _sum_pair(acc, self.unassigned)

    def scaled(self, c) -> "StepMeasure":
        def sc(enc):
            return enc[0] * c, None if enc[1] is None else enc[1] * c

        return StepMeasure(
            self.p,
            self.dimension,
            self.depth,
            self.window,
            {k: sc(v) for k, v in self.entries.items()},
            sc(self.overflow),
            sc(self.unassigned),
            dict(self.meta),
        )

    def to_json(self) -> dict:
        def enc(e):
            return {"lower": e[0].to_json(), "upper": None if e[1] is None else e[1].to_json()}

        return {
            "p": self.p,
            "dimension": self.dimension,
            "depth": self.depth,
            "window": self.window,
            "entries": [
                {"center": [str(c) for c in key], "mass": enc(self.enclosure(key))} for key in sorted(self.entries)
            ],
            "overflow": enc(self.overflow_enclosure()),
            "unassigned": enc(self.unassigned),
        }


def _coordinate_data(chart_P0, chart_Pi, p):
    c0, s0, G0 = chart_P0.integral_form(p)
    coords = []
    for P in chart_Pi:
        if P.is_zero():
            coords.append(None)
            continue
        c, s, G = P.integral_form(p)
        coords.append((c - c0, s / s0, G.integer_terms()))
    return G0.integer_terms(), coords


def pushforward(
    curve: HyperellipticCurve,
    forms: Sequence[PluricanonicalForm],
    depth: int,
    window: int = 1,
    source_depth: int | None = None,
) -> StepMeasure:
    """Tabulate F_* <eta_0>^(1/m) for F = (eta_i / eta_0)_i at target depth ``depth``."""
    forms = list(forms)
    if not forms or forms[0].is_zero():
        raise ValueError("eta_0 must be a nonzero form")
    m = forms[0].m
    if any(f.m != m for f in forms):
        raise ValueError("forms must share m")
    for f in forms:
        validate_form(curve, f)
    p = curve.p
    D, A = depth, window
    N = len(forms) - 1
    cap = source_depth if source_depth is not None else D + 2 * A + 3
    entries: dict[tuple, _Mass] = {}
    overflow = _Mass()
    unassigned = _Mass()
    consts = []
    chart_sets = [build_charts(curve, f) for f in forms]
    for ci, base in enumerate(chart_sets[0]):
        assessor = CosetAssessor(base.integrand, p)
        const = assessor.constant
        consts.append(const)
        P0 = base.integrand.factors[0][0]
        G0, coords = _coordinate_data(P0, [cs[ci].integrand.factors[0][0] for cs in chart_sets[1:]], p)
        stack = list(reversed(base.domain))
        while stack:
            coset = stack.pop()
            t, a = coset.level, coset.center
            at_cap = t >= cap
            dens = assessor.assess(t, a, at_cap)
            if dens.kind == "split":
                stack.extend(reversed(list(coset.children())))
                continue
            g0 = _eval_int(G0, a)
            v0 = _val(g0, p)
            target, certain_overflow, determined = [], False, True
            for data in coords:
                if data is None:
                    target.append(Fraction(0))
                    continue
                shift, ratio, Gi = data
                gi = _eval_int(Gi, a)
                vi = _val(gi, p)
                if v0 < t:
                    if vi < t and shift + vi - v0 < -A:
                        certain_overflow = True
                        break
                    prec = shift + t - 2 * v0 + min(v0, min(vi, t))
                    value = Fraction(p) ** shift * ratio * Fraction(gi, g0)
                    if prec >= D:
                        if valuation(value, p) < -A:
                            certain_overflow = True
                            break
                        target.append(reduce_center(value, D, p))
                    else:
                        determined = False
                else:
                    if vi < t and t - shift - vi > A:
                        certain_overflow = True
                        break
                    determined = False
            resolved_density = dens.kind in ("resolved", "exact")
            if certain_overflow:
                bucket = overflow
            elif determined:
                bucket = entries.setdefault(tuple(target), _Mass())
            elif not at_cap:
                stack.extend(reversed(list(coset.children())))
                continue
            else:
                bucket = unassigned
            if dens.kind == "resolved":
                bucket.add_resolved((ci, dens.exponent), dens.weight)
            elif dens.kind == "exact":
                bucket.add(dens.lo, dens.hi)
            elif dens.kind == "bounded":
                bucket.add(dens.lo, dens.hi)
            else:
                bucket.add(RadicalValue.zero(p), None)
            del resolved_density

    def finish(mass: _Mass):
        lo = hi = RadicalValue.zero(p)
        for ci, const in enumerate(consts):
            sub = {e: c for (k, e), c in mass.counts.items() if k == ci}
            val = power_sum(p, sub) * const
            lo = lo + val
            hi = hi + val
        for x in mass.lo:
            lo = lo + x
        if mass.unbounded:
            return lo, None
        for x in mass.hi:
            hi = hi + x
        return lo, hi

    return StepMeasure(
        p,
        N,
        D,
        A,
        {k: finish(v) for k, v in sorted(entries.items())},
        finish(overflow),
        finish(unassigned),
        {"source_depth": cap},
    )


# -- isometry scans ---------------------------------------------------------


def sample_grid(p: int, n: int, M: int = 1) -> list[tuple]:
    """Representatives k * p^-M, 0 <= k < p^(2M), of p^-M Z / p^M Z in each coordinate."""
    axis = [Fraction(k, p**M) for k in range(p ** (2 * M))]
    return list(product(axis, repeat=n))


@dataclass
class IsometryReport:
    verdict: str
    samples: list
    first_failure: tuple | None

    @property
    def consistent(self) -> bool:
        return self.verdict == "isometry-consistent"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "first_failure": None if self.first_failure is None else [str(x) for x in self.first_failure],
            "samples": [
                {"v": [str(x) for x in v], "left": left.to_json(), "right": right.to_json(), "intersect": ok}
                for v, left, right, ok in self.samples
            ],
        }


def isometry_scan(setup_x: Setup, setup_y: Setup, v_samples: Iterable, depth: int = 2, stop_early: bool = False) -> IsometryReport:
    """Compare pseudonorms of eta_0 + sum v_i eta_i on both sides for each sample v."""
    if len(setup_x.forms) != len(setup_y.forms):
        raise ValueError("setups must have the same number of forms")
    if setup_x.forms[0].m != setup_y.forms[0].m:
        raise ValueError("setups must share m")
    rows = []
    first = None
    for v in v_samples:
        v = tuple(v)
        left = linear_combination_pseudonorm(setup_x.curve, setup_x.forms, v, depth)
        right = linear_combination_pseudonorm(setup_y.curve, setup_y.forms, v, depth)
        ok = left.intersects(right)
        rows.append((v, left, right, ok))
        if not ok and first is None:
            first = v
            if stop_early:
                break
    verdict = "isometry-consistent" if first is None else "isometry-violated"
    return IsometryReport(verdict, rows, first)


# -- equimeasurability ------------------------------------------------------


@dataclass
class CompareReport:
    verdict: str
    max_gap: RadicalValue
    witness: tuple | None
    max_midpoint_difference: float

    @property
    def equal(self) -> bool:
        return self.verdict == "EQUAL"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "max_gap": self.max_gap.to_json(),
            "witness": None if self.witness is None else [str(c) for c in self.witness] if self.witness != "overflow" else "overflow",
            "max_midpoint_difference": self.max_midpoint_difference,
        }


def _gap(e1, e2, p):
    z = RadicalValue.zero(p)
    g = z
    if e1[1] is not None:
        d = e2[0] - e1[1]
        if d > g:
            g = d
    if e2[1] is not None:
        d = e1[0] - e2[1]
        if d > g:
            g = d
    return g


def _mid(e):
    if e[1] is None:
        return float("inf")
    return (float(e[0]) + float(e[1])) / 2


def equimeasurable_compare(sm1: StepMeasure, sm2: StepMeasure) -> CompareReport:
    """Coset-by-coset comparison of two step measures' enclosures."""
    if (sm1.p, sm1.dimension, sm1.depth, sm1.window) != (sm2.p, sm2.dimension, sm2.depth, sm2.window):
        raise ValueError("step measures have mismatched resolution")
    p = sm1.p
    best = RadicalValue.zero(p)
    witness = None
    mid = 0.0
    keys = sorted(set(sm1.entries) | set(sm2.entries))
    pairs = [(k, sm1.enclosure(k), sm2.enclosure(k)) for k in keys]
    pairs.append(("overflow", sm1.overflow_enclosure(), sm2.overflow_enclosure()))
    for key, e1, e2 in pairs:
        g = _gap(e1, e2, p)
        if g > best:
            best, witness = g, key
        d = abs(_mid(e1) - _mid(e2))
        if d == d:
            mid = max(mid, d)
    verdict = "EQUAL" if witness is None else "NOT-EQUAL"
    return CompareReport(verdict, best, witness, mid)
