"""Command-line entry point.

Every subcommand prints one JSON document on stdout with a versioned
``schema`` tag.  Timing goes to stderr so stdout is byte-identical across
runs with the same arguments.

Exit codes: 0 success, 1 usage, 2 computation error, 3 property failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import jsonschema

from . import __version__
from .curve import HyperellipticCurve, PluricanonicalForm, pseudonorm
from .equimeasure import equimeasurable_compare, pushforward
from .fourier import StepFunction, fourier_nonvanish, fourier_step, witness_construct, witness_verify
from .fq import parse_field
from .geometry import (
    HomogeneousPoly,
    IntersectionProfile,
    StageError,
    bounds,
    count_points,
    verify_nontrivial,
)
from .integrate import Coset, Integrand, integrate
from .poly import SparsePolynomial

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_PROPERTY = 0, 1, 2, 3

SCHEMA_VERSION = 1

_BASE_SCHEMA = {
    "type": "object",
    "required": ["schema", "version", "command", "parameters", "result"],
    "properties": {
        "schema": {"type": "string", "pattern": r"^padiclab/[a-z-]+/v\d+$"},
        "version": {"type": "string"},
        "command": {"type": "string"},
        "parameters": {"type": "object"},
        "result": {"type": "object"},
        "status": {"enum": ["ok", "property-failure", "error"]},
    },
}

_ENCLOSURE = {
    "type": "object",
    "required": ["lower", "upper", "unresolved_mass", "depth"],
    "properties": {"lower": {"type": "object", "required": ["exact", "decimal"]}},
}

RESULT_SCHEMAS = {
    "integrate": _ENCLOSURE,
    "pseudonorm": _ENCLOSURE,
    "equimeasure": {"type": "object", "required": ["verdict", "max_gap", "left", "right"]},
    "witness": {"type": "object", "required": ["function", "verification"]},
    "fourier": {"type": "object", "required": ["tau", "transform"]},
    "count-points": {"type": "object", "required": ["count", "candidates"]},
    "bounds": {"type": "object"},
    "verify-nontrivial": {"type": "object", "required": ["ok"]},
    "corpus": {"type": "object", "required": ["criteria"]},
}


def schema_for(command: str) -> dict:
    schema = json.loads(json.dumps(_BASE_SCHEMA))
    schema["properties"]["result"] = RESULT_SCHEMAS[command]
    return schema


def envelope(command: str, parameters: dict, result: dict, status: str = "ok") -> dict:
    doc = {
        "schema": f"padiclab/{command}/v{SCHEMA_VERSION}",
        "version": __version__,
        "command": command,
        "parameters": parameters,
        "status": status,
        "result": result,
    }
    jsonschema.validate(doc, schema_for(command))
    return doc


class UsageError(Exception):
    pass


def _fraction(text: str, flag: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{flag}: cannot parse {text!r} as a rational number")


def _read_poly(args, nvars=None) -> SparsePolynomial:
    if getattr(args, "poly", None) is None:
        raise UsageError("--poly is required")
    text = args.poly
    path = Path(text)
    if path.suffix in (".json", ".txt") or path.is_file():
        if not path.is_file():
            raise UsageError(f"--poly: no such file {text}")
        raw = path.read_text()
        try:
            return SparsePolynomial.from_json(json.loads(raw))
        except json.JSONDecodeError:
            text = raw.strip()
    try:
        return SparsePolynomial.parse(text, nvars)
    except ValueError as exc:
        raise UsageError(f"--poly: {exc}")


def _coeff_list(text: str, flag: str) -> list[Fraction]:
    return [_fraction(c, flag) for c in text.split(",") if c.strip()]


# -- subcommands ------------------------------------------------------------


def cmd_integrate(args):
    poly = _read_poly(args)
    r = _fraction(args.r, "--r")
    res = integrate(Integrand([(poly, r)]), depth=args.depth, p=args.p)
    params = {"p": args.p, "r": str(r), "poly": str(poly), "nvars": poly.nvars, "depth": args.depth}
    return envelope("integrate", params, res.to_json()), EXIT_OK


def _read_json(path: str, flag: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"{flag}: cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{flag}: {path} is not valid JSON ({exc.msg})")


def load_curve_file(path: str, flag: str = "--curve"):
    """Curve file: {"p", "precision", "h-coefficients", "forms": [{"m", "numerator-coefficients"}]}.

    The shorter keys "h" and "numerator" are accepted too.
    """
    doc = _read_json(path, flag)
    try:
        p = int(doc["p"])
        h = [_fraction(str(c), flag) for c in doc.get("h-coefficients", doc.get("h"))]
        forms = [
            PluricanonicalForm.from_coeffs(
                int(f.get("m", 1)), [_fraction(str(c), flag) for c in f.get("numerator-coefficients", f.get("numerator"))]
            )
            for f in doc.get("forms", [])
        ]
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{flag}: {path} is missing field {exc}")
    return HyperellipticCurve.from_coeffs(p, h, int(doc.get("precision", 20))), forms


def _curve_and_form(args):
    if args.curve:
        curve, forms = load_curve_file(args.curve)
        try:
            index = int(args.form)
        except ValueError:
            raise UsageError("--form: with --curve, give the index of a form in the file")
        if not 0 <= index < len(forms):
            raise UsageError(f"--form: index {index} out of range for {len(forms)} forms")
        return curve, forms[index]
    if args.p is None or args.h is None:
        raise UsageError("--p and --h are required without --curve")
    h = _coeff_list(args.h, "--h")
    curve = HyperellipticCurve.from_coeffs(args.p, h, args.precision)
    form = PluricanonicalForm.from_coeffs(args.m, _coeff_list(args.form, "--form"))
    return curve, form


def cmd_pseudonorm(args):
    curve, form = _curve_and_form(args)
    res = pseudonorm(curve, form, args.depth, args.cut)
    params = {"curve": curve.to_json(), "m": form.m, "form": [str(c) for c in form.numerator.coefficients()], "depth": args.depth}
    return envelope("pseudonorm", params, res.to_json()), EXIT_OK


def _forms(text: str, m: int) -> list[PluricanonicalForm]:
    return [PluricanonicalForm.from_coeffs(m, _coeff_list(f, "--forms")) for f in text.split(";")]


def _equimeasure_inputs(args):
    if args.left or args.right:
        if not (args.left and args.right):
            raise UsageError("--left and --right must be given together")
        c1, f1 = load_curve_file(args.left, "--left")
        c2, f2 = load_curve_file(args.right, "--right")
        if c1.p != c2.p:
            raise UsageError("--right: curves over different primes")
        return c1, c2, f1, f2, {"left": args.left, "right": args.right}
    missing = [f for f, v in (("--p", args.p), ("--h1", args.h1), ("--h2", args.h2), ("--forms1", args.forms1), ("--forms2", args.forms2)) if v is None]
    if missing:
        raise UsageError(f"{missing[0]} is required without --left/--right")
    c1 = HyperellipticCurve.from_coeffs(args.p, _coeff_list(args.h1, "--h1"))
    c2 = HyperellipticCurve.from_coeffs(args.p, _coeff_list(args.h2, "--h2"))
    f1, f2 = _forms(args.forms1, args.m), _forms(args.forms2, args.m)
    params = {"p": args.p, "h1": args.h1, "h2": args.h2, "forms1": args.forms1, "forms2": args.forms2, "m": args.m}
    return c1, c2, f1, f2, params


def cmd_equimeasure(args):
    c1, c2, f1, f2, params = _equimeasure_inputs(args)
    if not f1 or len(f1) != len(f2):
        raise UsageError("--forms1 and --forms2 need the same positive number of forms")
    s1 = pushforward(c1, f1, args.depth, args.window)
    s2 = pushforward(c2, f2, args.depth, args.window)
    cmp = equimeasurable_compare(s1, s2)
    result = cmp.to_json() | {"left": s1.to_json(), "right": s2.to_json()}
    params |= {"depth": args.depth, "window": args.window}
    return envelope("equimeasure", params, result), EXIT_OK


def cmd_witness(args):
    r = _fraction(args.r, "--r")
    w = witness_construct(args.p, r)
    ver = witness_verify(w, args.samples)
    result = {"function": w.to_json(), "value_at_zero": w(0).to_json(), "verification": ver.to_json()}
    ok = ver.ok
    if args.window is not None:
        nv = fourier_nonvanish(w, args.window, args.depth)
        result["nonvanish"] = nv.to_json()
        ok = ok and nv.ok
    params = {"p": args.p, "r": str(r), "samples": args.samples, "window": args.window, "depth": args.depth}
    status = "ok" if ok else "property-failure"
    return envelope("witness", params, result, status), EXIT_OK if ok else EXIT_PROPERTY


def _step_function(args):
    if args.fn:
        doc = _read_json(args.fn, "--fn")
        try:
            p = int(doc["p"])
            items = [(str(c["center"]), str(c["level"]), str(c["value"])) for c in doc["pieces"]]
        except (KeyError, TypeError) as exc:
            raise UsageError(f"--fn: {args.fn} is missing field {exc}")
        flag = "--fn"
    else:
        if args.p is None or not args.coset:
            raise UsageError("--p and --coset are required without --fn")
        p, flag, items = args.p, "--coset", []
        for item in args.coset:
            parts = tuple(item.split(":"))
            if len(parts) != 3:
                raise UsageError(f"--coset: expected center:level:value, got {item!r}")
            items.append(parts)
    pieces = []
    for center, level, value in items:
        try:
            level = int(level)
        except ValueError:
            raise UsageError(f"{flag}: level {level!r} is not an integer")
        pieces.append((Coset(p, level, (_fraction(center, flag),)), _fraction(value, flag)))
    try:
        return StepFunction(p, pieces), p, [":".join(t) for t in items]
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}")


def cmd_fourier(args):
    f, p, cosets = _step_function(args)
    tau = _fraction(args.tau, "--tau")
    ps = fourier_step(f, tau)
    z = complex(ps.to_complex())
    result = {
        "tau": str(tau),
        "transform": {
            "phases": [{"phase": str(q), "coefficient": str(c)} for q, c in sorted(ps.terms.items())],
            "decimal": [round(z.real, 15), round(z.imag, 15)],
        },
    }
    params = {"p": p, "cosets": cosets, "tau": args.tau}
    return envelope("fourier", params, result), EXIT_OK


def _read_hpoly(args, field):
    poly = _read_poly(args)
    try:
        return HomogeneousPoly.from_sparse(poly, field)
    except ValueError as exc:
        raise UsageError(f"--poly: {exc}")


def cmd_count_points(args):
    field = parse_field(args.field)
    F = _read_hpoly(args, field)
    n = count_points(F)
    cand = (field.q**F.nvars - 1) // (field.q - 1)
    params = {"field": {"p": field.p, "e": field.e, "modulus": list(field.modulus)}, "poly": str(F), "nvars": F.nvars}
    return envelope("count-points", params, {"count": n, "candidates": cand}), EXIT_OK


def _int_list(text, flag):
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated integers, got {text!r}")


def cmd_bounds(args):
    kwargs = {}
    if args.profile:
        vals = _int_list(args.profile, "--profile")
        if len(vals) != 3:
            raise UsageError("--profile expects n,Hn,KHn1")
        try:
            kwargs["profile"] = IntersectionProfile(*vals)
        except ValueError as exc:
            raise UsageError(f"--profile: {exc}")
    if args.genus is not None:
        kwargs["genus"] = args.genus
    if args.ksq is not None:
        kwargs["ksq"] = args.ksq
    if args.ci:
        kwargs["ci"] = _int_list(args.ci, "--ci")
    if not kwargs:
        raise UsageError("bounds needs one of --profile, --genus, --ksq, --ci")
    try:
        table = bounds(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc))
    params = {k: (v.__dict__ if isinstance(v, IntersectionProfile) else v) for k, v in kwargs.items()}
    return envelope("bounds", params, table), EXIT_OK


def cmd_verify_nontrivial(args):
    field = parse_field(args.field)
    F = _read_hpoly(args, field)
    params = {"field": {"p": field.p, "e": field.e}, "poly": str(F)}
    try:
        cert = verify_nontrivial(F, field, args.search_degree)
        code, status = EXIT_OK, "ok"
    except StageError as exc:
        cert = exc.certificate | {"ok": False, "failed_stage": exc.stage, "error": str(exc)}
        code, status = EXIT_PROPERTY, "property-failure"
    doc = envelope("verify-nontrivial", params, cert, status)
    if args.certificate:
        Path(args.certificate).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return doc, code


def cmd_corpus(args):
    from .corpus import CRITERIA, run_criterion

    numbers = _int_list(args.criteria, "--criteria") if args.criteria else sorted(CRITERIA)
    bad = [n for n in numbers if n not in CRITERIA]
    if bad:
        raise UsageError(f"--criteria: unknown criterion {bad[0]}")
    out = []
    for n in numbers:
        res = run_criterion(n)
        print(f"{res.line()} [{res.seconds:.1f}s]", file=sys.stderr)
        out.append(res.to_json())
    ok = all(r["passed"] for r in out)
    status = "ok" if ok else "property-failure"
    return envelope("corpus", {"criteria": numbers}, {"criteria": out}, status), EXIT_OK if ok else EXIT_PROPERTY


# -- parser -------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="padiclab", description="p-adic integration, pseudonorms and point-count bounds")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("integrate", help="certified enclosure of the integral of |F|^r over Z_p^n")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--r", default="1")
    s.add_argument("--poly", required=True, help="polynomial text or a JSON/text file")
    s.add_argument("--depth", type=int, default=6)
    s.set_defaults(func=cmd_integrate)

    s = sub.add_parser("pseudonorm", help="pseudonorm of P(x)(dx/y)^m on y^2 = h(x)")
    s.add_argument("--curve", help="curve JSON file; then --form is an index into its forms")
    s.add_argument("--p", type=int)
    s.add_argument("--h", help="coefficients of h, increasing degree, comma separated")
    s.add_argument("--form", default="1", help="coefficients of P, or a form index with --curve")
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--depth", type=int, default=6)
    s.add_argument("--cut", type=int, default=0)
    s.add_argument("--precision", type=int, default=20)
    s.set_defaults(func=cmd_pseudonorm)

    s = sub.add_parser("equimeasure", help="compare pushforward measures of two form tuples")
    s.add_argument("--left", help="curve JSON file with its forms")
    s.add_argument("--right", help="curve JSON file with its forms")
    s.add_argument("--p", type=int)
    s.add_argument("--h1")
    s.add_argument("--h2")
    s.add_argument("--forms1", help="forms separated by ';', coefficients by ','")
    s.add_argument("--forms2")
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--window", type=int, default=1)
    s.set_defaults(func=cmd_equimeasure)

    s = sub.add_parser("witness", help="construct and verify the compactly supported witness")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--r", default="1")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--window", type=int, default=None, help="also search for tau0 with |tau0| <= p^window")
    s.add_argument("--depth", type=int, default=4)
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("fourier", help="exact transform of a step function at tau")
    s.add_argument("--fn", help='JSON file {"p": 3, "pieces": [{"center": "1/3", "level": 0, "value": "2"}]}')
    s.add_argument("--p", type=int)
    s.add_argument("--coset", action="append", help="center:level:value, repeatable")
    s.add_argument("--tau", required=True)
    s.set_defaults(func=cmd_fourier)

    s = sub.add_parser("count-points", help="projective zeros over F_q")
    s.add_argument("--field", required=True, help="q or p^e")
    s.add_argument("--poly", required=True)
    s.set_defaults(func=cmd_count_points)

    s = sub.add_parser("bounds", help="rational-point thresholds")
    s.add_argument("--profile", help="n,Hn,KHn1")
    s.add_argument("--genus", type=int)
    s.add_argument("--ksq", type=int)
    s.add_argument("--ci", help="d1,d2,...")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("verify-nontrivial", help="certificate chain for a smooth surface in P^3")
    s.add_argument("--field", required=True)
    s.add_argument("--poly", required=True)
    s.add_argument("--certificate", help="also write the certificate JSON here")
    s.add_argument("--search-degree", type=int, default=1)
    s.set_defaults(func=cmd_verify_nontrivial)

    s = sub.add_parser("corpus", help="run acceptance corpora")
    s.add_argument("--criteria", help="comma-separated criterion numbers (default all)")
    s.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        doc, code = args.func(args)
    except UsageError as exc:
        print(f"padiclab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError) as exc:
        doc = {
            "schema": f"padiclab/{args.command}/v{SCHEMA_VERSION}",
            "version": __version__,
            "command": args.command,
            "status": "error",
            "error": str(exc),
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
        print(f"padiclab {args.command}: computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    print(json.dumps(doc, indent=2, sort_keys=True))
    print(f"elapsed {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
