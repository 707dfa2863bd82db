"""Projective hypersurfaces over F_q: point counts, smoothness, hyperplane
sections, and the rational-point threshold calculators."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from math import prod

import numpy as np

from .fq import FqField
from .poly import SparsePolynomial, parse_poly

__all__ = [
    "HomogeneousPoly",
    "projective_points",
    "count_points",
    "SmoothnessResult",
    "is_smooth",
    "macaulay_rank",
    "hyperplanes",
    "SectionResult",
    "smooth_section_search",
    "IntersectionProfile",
    "adjunction_genus",
    "profile_threshold",
    "canonical_threshold",
    "hasse_weil_threshold",
    "complete_intersection_threshold",
    "bounds",
    "HasseWeilResult",
    "hasse_weil_check",
    "StageError",
    "verify_nontrivial",
]

_CHUNK = 1 << 18


@dataclass(frozen=True)
class HomogeneousPoly:
    field: FqField
    nvars: int
    terms: tuple  # sorted ((exps, coeff code), ...), nonzero coefficients

    def __init__(self, field: FqField, nvars: int, terms):
        acc: dict[tuple, int] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for exps, c in items:
            exps = tuple(int(x) for x in exps)
            if len(exps) != nvars:
                raise ValueError("exponent length does not match nvars")
            prev = acc.get(exps, 0)
            acc[exps] = int(field.add(prev, int(c)))
        clean = tuple(sorted((e, c) for e, c in acc.items() if c))
        if len({sum(e) for e, _ in clean}) > 1:
            raise ValueError("polynomial is not homogeneous")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_sparse(cls, poly: SparsePolynomial, field: FqField) -> "HomogeneousPoly":
        p = field.p
        terms = []
        for e, c in poly.terms:
            if c.denominator % p == 0:
                raise ValueError(f"coefficient {c} is not p-integral")
            terms.append((e, c.numerator * pow(c.denominator, -1, p) % p))
        return cls(field, poly.nvars, terms)

    @classmethod
    def parse(cls, text: str, field: FqField, nvars: int | None = None) -> "HomogeneousPoly":
        return cls.from_sparse(parse_poly(text, nvars), field)

    @property
    def degree(self) -> int:
        return sum(self.terms[0][0]) if self.terms else -1

    def is_zero(self) -> bool:
        return not self.terms

    def derivative(self, i: int) -> "HomogeneousPoly":
        F = self.field
        out = []
        for e, c in self.terms:
            if e[i] % F.p:
                d = list(e)
                d[i] -= 1
                out.append((tuple(d), int(F.mul(c, F.from_int(e[i])))))
        return HomogeneousPoly(F, self.nvars, out)

    def __add__(self, other: "HomogeneousPoly") -> "HomogeneousPoly":
        return HomogeneousPoly(self.field, self.nvars, list(self.terms) + list(other.terms))

    def __mul__(self, other: "HomogeneousPoly") -> "HomogeneousPoly":
        F = self.field
        acc: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = int(F.add(acc.get(e, 0), F.mul(c1, c2)))
        return HomogeneousPoly(F, self.nvars, acc)

    def substitute_linear(self, index: int, linear: dict) -> "HomogeneousPoly":
        """Set x_index = sum_j linear[j] x_j and drop x_index from the variables."""
        F = self.field
        keep = [j for j in range(self.nvars) if j != index]
        lin_terms = []
        for j, a in linear.items():
            if a:
                e = [0] * (self.nvars - 1)
                e[keep.index(j)] = 1
                lin_terms.append((tuple(e), a))
        n = self.nvars - 1
        one = HomogeneousPoly(F, n, [((0,) * n, 1)])
        lin = HomogeneousPoly(F, n, lin_terms)
        powers = [one]
        total = HomogeneousPoly(F, n, [])
        for e, c in self.terms:
            while len(powers) <= e[index]:
                powers.append(powers[-1] * lin)
            rest = tuple(e[j] for j in keep)
            total = total + HomogeneousPoly(F, n, [(rest, c)]) * powers[e[index]]
        return total

    def embed(self, big: FqField, emb: np.ndarray) -> "HomogeneousPoly":
        return HomogeneousPoly(big, self.nvars, [(e, int(emb[c])) for e, c in self.terms])

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        F = self.field
        points = np.asarray(points, dtype=np.int64)
        total = np.zeros(points.shape[0], dtype=np.int64)
        cache: dict = {}
        for e, c in self.terms:
            term = np.full(points.shape[0], c, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    if (i, k) not in cache:
                        cache[(i, k)] = F.power(points[:, i], k)
                    term = F.mul(term, cache[(i, k)])
            total = F.add(total, term)
        return total

    def __str__(self):
        F = self.field
        parts = []
        for e, c in sorted(self.terms, key=lambda t: tuple(-x for x in t[0])):
            mono = "*".join(f"x{i}" if k == 1 else f"x{i}^{k}" for i, k in enumerate(e) if k)
            coef = F.element_str(c)
            if F.e > 1 and c >= F.p:
                coef = f"({coef})"
            parts.append(mono if coef == "1" and mono else f"{coef}*{mono}" if mono else coef)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"nvars": self.nvars, "degree": self.degree, "field": [self.field.p, self.field.e], "text": str(self)}


def projective_points(field: FqField, nvars: int):
    """Yield chunks of normalized representatives (first nonzero coordinate 1),
    starting with (0, ..., 0, 1)."""
    q = field.q
    for lead in range(nvars - 1, -1, -1):
        free = nvars - 1 - lead
        total = q**free
        for start in range(0, total, _CHUNK):
            idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
            pts = np.zeros((idx.size, nvars), dtype=np.int64)
            pts[:, lead] = 1
            for j in range(free):
                pts[:, nvars - 1 - j] = (idx // q**j) % q
            yield pts


def count_points(F: HomogeneousPoly, field: FqField | None = None) -> int:
    """Number of projective zeros of F over its field."""
    if F.is_zero():
        raise ValueError("count_points needs a nonzero polynomial")
    field = field or F.field
    if field != F.field:
        raise ValueError("polynomial is defined over a different field")
    return int(sum(int(np.count_nonzero(F.evaluate(pts) == 0)) for pts in projective_points(field, F.nvars)))


# -- smoothness ---------------------------------------------------------------


def _monomials(n: int, d: int) -> list[tuple]:
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(out, reverse=True)


def _rank(field: FqField, M: np.ndarray) -> int:
    M = M.copy()
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r] = field.mul(M[r], field.inv(M[r, c]))
        factors = M[:, c].copy()
        factors[r] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            M[hit] = field.sub(M[hit], field.mul(factors[hit, None], M[r][None, :]))
        r += 1
    return r


def macaulay_rank(polys: list[HomogeneousPoly], degree: int) -> tuple[int, int]:
    """(rank, number of monomials) of the degree-``degree`` Macaulay matrix."""
    field = polys[0].field
    n = polys[0].nvars
    cols = _monomials(n, degree)
    col_index = {e: i for i, e in enumerate(cols)}
    rows = []
    for f in polys:
        if f.is_zero() or f.degree > degree:
            continue
        for mono in _monomials(n, degree - f.degree):
            row = np.zeros(len(cols), dtype=np.int64)
            for e, c in f.terms:
                row[col_index[tuple(a + b for a, b in zip(e, mono))]] = c
            rows.append(row)
    if not rows:
        return 0, len(cols)
    return _rank(field, np.array(rows)), len(cols)


@dataclass
class SmoothnessResult:
    verdict: str  # "certified-smooth" | "singular-at" | "inconclusive"
    witness: tuple | None = None
    extension_degree: int | None = None
    method: str = ""
    details: dict = field(default_factory=dict)

    @property
    def smooth(self) -> bool:
        return self.verdict == "certified-smooth"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": None if self.witness is None else list(self.witness),
            "extension_degree": self.extension_degree,
            "method": self.method,
            "details": self.details,
        }


def _search_singular(F: HomogeneousPoly, S: int, budget: int):
    field = F.field
    searched = []
    for s in range(1, S + 1):
        if field.q ** (s * (F.nvars - 1)) > budget:
            break
        if s == 1:
            G = F
        else:
            big, emb = field.extension(s)
            G = F.embed(big, emb)
        partials = [G.derivative(i) for i in range(G.nvars)]
        for pts in projective_points(G.field, G.nvars):
            mask = G.evaluate(pts) == 0
            for P in partials:
                if not mask.any():
                    break
                mask &= P.evaluate(pts) == 0
            if mask.any():
                return s, tuple(int(x) for x in pts[np.argmax(mask)]), searched
        searched.append(s)
    return None, None, searched


def is_smooth(F: HomogeneousPoly, field: FqField | None = None, search_degree: int = 1, budget: int = 2_000_000) -> SmoothnessResult:
    """Decide smoothness of V(F).

    Rational singular points are searched over F_(q^s), s <= search_degree
    (as far as ``budget`` points allows).  Failing that, the partials have no
    common zero over the algebraic closure iff their Macaulay matrix in degree
    n(d-2)+1 has full rank; when p does not divide d, Euler's identity puts F
    in the ideal of partials, so rank deficiency proves a singular point.
    """
    if F.is_zero():
        raise ValueError("is_smooth needs a nonzero polynomial")
    field = field or F.field
    d, n = F.degree, F.nvars
    s, witness, searched = _search_singular(F, search_degree, budget)
    if witness is not None:
        return SmoothnessResult("singular-at", witness, s, "search", {"searched_degrees": searched + [s]})
    if d == 1:
        return SmoothnessResult("certified-smooth", method="linear", details={"searched_degrees": searched})
    partials = [F.derivative(i) for i in range(n)]
    D = n * (d - 2) + 1
    rank, ncols = macaulay_rank(partials, D)
    details = {"searched_degrees": searched, "macaulay_degree": D, "macaulay_rank": rank, "monomials": ncols}
    if rank == ncols:
        return SmoothnessResult("certified-smooth", method="macaulay", details=details)
    if d % field.p:
        return SmoothnessResult("singular-at", None, None, "macaulay", details)
    rank_f, _ = macaulay_rank(partials + [F], D)
    details["macaulay_rank_with_F"] = rank_f
    if rank_f == ncols:
        return SmoothnessResult("certified-smooth", method="macaulay", details=details)
    return SmoothnessResult("inconclusive", method="macaulay", details=details)


# -- hyperplane sections ------------------------------------------------------


def hyperplanes(field: FqField, nvars: int = 4):
    """Normalized hyperplanes: leading coefficient 1, starting from (0,...,0,1)."""
    q = field.q
    for pivot in range(nvars - 1, -1, -1):
        for tail in product(range(q), repeat=nvars - 1 - pivot):
            yield (0,) * pivot + (1,) + tail


@dataclass
class SectionResult:
    hyperplane: tuple | None
    pivot: int | None
    curve: HomogeneousPoly | None
    smoothness: SmoothnessResult | None
    tried: int
    singular: int
    inconclusive: int

    @property
    def found(self) -> bool:
        return self.hyperplane is not None

    def to_json(self) -> dict:
        return {
            "status": "found" if self.found else ("undecided" if self.inconclusive else "exhausted"),
            "hyperplane": None if self.hyperplane is None else list(self.hyperplane),
            "pivot": self.pivot,
            "curve": None if self.curve is None else self.curve.to_json(),
            "smoothness": None if self.smoothness is None else self.smoothness.to_json(),
            "tried": self.tried,
            "singular": self.singular,
            "inconclusive": self.inconclusive,
        }


def section_curve(F: HomogeneousPoly, hyperplane: tuple) -> tuple[int, HomogeneousPoly]:
    field = F.field
    pivot = next(i for i, a in enumerate(hyperplane) if a)
    linear = {j: int(field.neg(a)) for j, a in enumerate(hyperplane) if j > pivot and a}
    return pivot, F.substitute_linear(pivot, linear)


def smooth_section_search(
    F: HomogeneousPoly, field: FqField | None = None, search_degree: int = 1, check_input: bool = True
) -> SectionResult:
    """First hyperplane H with V(F) meet H a certified-smooth plane curve."""
    field = field or F.field
    if F.nvars != 4:
        raise ValueError("smooth_section_search expects a surface in P^3")
    if check_input and not is_smooth(F, field, search_degree).smooth:
        raise ValueError("input surface is not certified smooth")
    tried = singular = inconclusive = 0
    for H in hyperplanes(field, 4):
        tried += 1
        pivot, C = section_curve(F, H)
        if C.is_zero() or C.degree != F.degree:
            singular += 1
            continue
        res = is_smooth(C, field, search_degree)
        if res.smooth:
            return SectionResult(H, pivot, C, res, tried, singular, inconclusive)
        if res.verdict == "singular-at":
            singular += 1
        else:
            inconclusive += 1
    return SectionResult(None, None, None, None, tried, singular, inconclusive)


# -- bounds -------------------------------------------------------------------


@dataclass(frozen=True)
class IntersectionProfile:
    n: int
    Hn: int
    KHn1: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be positive")
        if self.Hn < 1:
            raise ValueError("H^n must be at least 1")

    @classmethod
    def hypersurface(cls, d: int, n: int = 2) -> "IntersectionProfile":
        """Smooth degree-d hypersurface in P^(n+1): K = (d - n - 2) H."""
        return cls(n, d, d * (d - n - 2))


def adjunction_genus(profile: IntersectionProfile) -> int:
    """Genus of a curve cut by n-1 general hyperplane sections."""
    rhs = profile.KHn1 + (profile.n - 1) * profile.Hn
    if rhs % 2 or rhs < -2:
        raise ValueError(f"invalid profile: 2g-2 = {rhs} must be even and >= -2")
    return (rhs + 2) // 2


def profile_threshold(profile: IntersectionProfile) -> int:
    H, K, n = profile.Hn, profile.KHn1, profile.n
    return max(H * (H - 1) ** n, (K + (n - 1) * H + 2) ** 2)


def canonical_threshold(K2: int) -> int:
    if K2 < 1:
        raise ValueError("K^2 must be positive")
    a = 25 * K2
    return max(a * (a - 1) ** 2, (30 * K2 + 2) ** 2)


def hasse_weil_threshold(g: int) -> int:
    if g < 0:
        raise ValueError("genus must be non-negative")
    return 4 * g * g


def complete_intersection_threshold(degrees) -> int:
    degrees = list(degrees)
    if not degrees or any(d < 1 for d in degrees):
        raise ValueError("degrees must be positive")
    return 2 * (2 + sum(d - 1 for d in degrees)) ** 2 * prod(degrees) ** 2


def bounds(profile: IntersectionProfile | None = None, genus: int | None = None, ksq: int | None = None, ci=None) -> dict:
    """Every applicable threshold: q above it guarantees a rational point."""
    out = {}
    if profile is not None:
        H, K, n = profile.Hn, profile.KHn1, profile.n
        out["profile"] = {
            "n": n,
            "Hn": H,
            "KHn1": K,
            "degree_term": H * (H - 1) ** n,
            "genus_term": (K + (n - 1) * H + 2) ** 2,
            "threshold": profile_threshold(profile),
        }
    if genus is not None:
        out["genus"] = {"g": genus, "threshold": hasse_weil_threshold(genus)}
    if ksq is not None:
        out["ksq"] = {"K2": ksq, "threshold": canonical_threshold(ksq)}
    if ci is not None:
        out["ci"] = {"degrees": list(ci), "threshold": complete_intersection_threshold(ci)}
    return out


@dataclass
class HasseWeilResult:
    passed: bool
    lhs: int
    rhs: int

    @property
    def margin(self) -> int:
        return self.rhs - self.lhs

    def to_json(self) -> dict:
        return {"pass": self.passed, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin}


def hasse_weil_check(count: int, g: int, q: int) -> HasseWeilResult:
    """(1 + q - count)^2 <= 4 g^2 q, in integers."""
    lhs = (1 + q - count) ** 2
    rhs = 4 * g * g * q
    return HasseWeilResult(lhs <= rhs, lhs, rhs)


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str, certificate: dict | None = None):
        super().__init__(f"{stage}: {message}")
        self.stage = stage
        self.certificate = certificate or {}


def verify_nontrivial(F: HomogeneousPoly, field: FqField | None = None, search_degree: int = 1) -> dict:
    """Run the full chain for a smooth surface in P^3 and return the certificate."""
    field = field or F.field
    q, d = field.q, F.degree
    cert: dict = {"field": {"p": field.p, "e": field.e, "q": q}, "surface": F.to_json()}
    if F.nvars != 4:
        raise StageError("input", "expected a surface in P^3", cert)
    sm = is_smooth(F, field, search_degree)
    cert["smoothness"] = sm.to_json()
    if not sm.smooth:
        raise StageError("smoothness", f"surface is {sm.verdict}", cert)
    profile = IntersectionProfile.hypersurface(d, 2)
    cert["profile"] = {"n": profile.n, "Hn": profile.Hn, "KHn1": profile.KHn1}
    threshold = profile_threshold(profile)
    cert["threshold"] = threshold
    cert["bound_applicable"] = q > threshold
    sec = smooth_section_search(F, field, search_degree, check_input=False)
    cert["section"] = sec.to_json()
    if not sec.found:
        status = "undecided" if sec.inconclusive else "exhausted"
        cert["section_status"] = status
        raise StageError("section", f"no certified-smooth section ({status})", cert)
    g = adjunction_genus(profile)
    cert["section_genus"] = g
    cert["plane_curve_genus"] = (d - 1) * (d - 2) // 2
    if g != cert["plane_curve_genus"]:
        raise StageError("genus", "adjunction genus disagrees with the plane-curve genus", cert)
    n_sec = count_points(sec.curve)
    cert["section_count"] = n_sec
    hw = hasse_weil_check(n_sec, g, q)
    cert["hasse_weil"] = hw.to_json()
    if not hw.passed:
        raise StageError("hasse-weil", "section violates the Hasse-Weil bound", cert)
    n_surf = count_points(F)
    cert["surface_count"] = n_surf
    cert["assumptions"] = ["the hyperplane section is geometrically connected"]
    cert["ok"] = n_surf > 0 or not cert["bound_applicable"]
    if cert["bound_applicable"] and n_surf == 0:
        raise StageError("surface-count", "no rational point above the threshold", cert)
    return cert
