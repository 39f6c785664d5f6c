"""Command-line front end: ``dchern {cohomology,chern,crystalline,selftest}``."""
from __future__ import annotations

import argparse
import json
import re
import sys
import time
from fractions import Fraction

from . import __version__
from .cech import (CochainError, CohomologyError, NotGradable, SchemeError, TotalCochain, bundle_from_spec,
                   builtin_scheme, cech_cohomology, class_coordinates, class_equal, cohomology_group,
                   de_rham_cohomology, endomorphisms, forms, hyperplane_power, parse_bundle, scheme_from_dict,
                   twisted)
from .charclass import DivisionObstruction, char_poly
from .crystalline import CrystallineError, DeRhamAlgebra, c1_de_rham, cris_vs_dr, crystal_obstruction_line
from .derived import GuardError
from .rings import make_ring
from .selftest import SUITES, run_suites

EXIT_OK, EXIT_COMPUTE, EXIT_INPUT, EXIT_SELFTEST = 0, 1, 2, 3


class Diagnostic(Exception):
    """A structured error: machine code, message and where in the input it happened."""

    def __init__(self, code, message, location=None, status=EXIT_INPUT):
        super().__init__(message)
        self.code = code
        self.message = message
        self.location = location
        self.status = status

    def as_dict(self):
        return {"code": self.code, "message": self.message, "location": self.location}


def _input_error(message, location, code="invalid_input"):
    return Diagnostic(code, message, location, EXIT_INPUT)


# ---------------------------------------------------------------- input loading

def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x.numerator)
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def load_document(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise _input_error(f"cannot read input document: {e.strerror}", path, "io_error") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise _input_error(f"malformed JSON: {e.msg}", f"{path}:{e.lineno}:{e.colno}", "malformed_json") from None
    if not isinstance(doc, dict):
        raise _input_error("the input document must be a JSON object", path, "malformed_json")
    return doc


def resolve_ring(args, doc):
    spec = args.base if args.base is not None else doc.get("base", "Q")
    where = "--base" if args.base is not None else "base"
    try:
        return make_ring(spec)
    except ValueError as e:
        raise _input_error(str(e), where, "bad_base") from None


def resolve_scheme(args, doc, ring):
    spec = args.scheme if args.scheme is not None else doc.get("scheme")
    where = "--scheme" if args.scheme is not None else "scheme"
    if spec is None:
        raise _input_error("no scheme given (use --scheme or an input document)", "--scheme", "missing_scheme")
    try:
        if isinstance(spec, str):
            return builtin_scheme(spec, ring)
        if isinstance(spec, dict):
            return scheme_from_dict(spec, ring)
    except (SchemeError, ValueError) as e:
        raise _input_error(str(e), where, "bad_scheme") from None
    raise _input_error("scheme must be a built-in name or a chart description", where, "bad_scheme")


def named_bundles(doc, X):
    out = {}
    for name, spec in (doc.get("bundles") or {}).items():
        try:
            out[name] = bundle_from_spec(spec, X, name=name)
        except (SchemeError, ValueError, KeyError, TypeError) as e:
            raise _input_error(str(e), f"bundles.{name}", "bad_bundle") from None
    return out


def resolve_bundle(text, X, named, where="--bundle"):
    try:
        return parse_bundle(text, X, named)
    except (SchemeError, ValueError) as e:
        raise _input_error(str(e), where, "bad_bundle") from None


_SHEAF = re.compile(r"^\s*(?:(Omega|End)(?:\^(\d+))?)?\s*(.*?)\s*$")


def parse_sheaf(text, X, named):
    """``O``, ``O(d)``, ``Omega^w``, ``Omega^w(d)``, ``Omega^w*E``, ``End E`` or any bundle expression."""
    m = _SHEAF.match(text)
    head, w, rest = m.group(1), int(m.group(2) or (1 if m.group(1) == "Omega" else 0)), m.group(3)
    rest = rest.lstrip("*").strip()
    if rest.startswith("(") and rest.endswith(")") and re.fullmatch(r"\(\s*-?\d+\s*\)", rest):
        rest = f"O{rest.replace(' ', '')}"
    if w > X.dim:
        raise _input_error(f"form degree {w} exceeds the dimension {X.dim}", "--sheaf", "bad_sheaf")
    if head == "End":
        if rest.startswith("(") and rest.endswith(")") and rest.count("(") == rest.count(")") and rest[1:2] != "-":
            rest = rest[1:-1].strip()
        return endomorphisms(resolve_bundle(rest or "O(0)", X, named, "--sheaf"), w)
    if rest in ("", "O"):
        return forms(w)
    return twisted(resolve_bundle(rest, X, named, "--sheaf"), w)


# ---------------------------------------------------------------- basis coordinates

def _hodge_basis(X, k):
    if getattr(X, "projective_dim", None) is not None:
        return ["h" if k == 1 else f"h^{k}"], [hyperplane_power(X, k)]
    cocycles = cohomology_group(X, forms(k), k).basis.get(k, [])
    return [f"g{k}_{i}" for i in range(len(cocycles))], cocycles


def _de_rham_basis(X, k):
    if getattr(X, "projective_dim", None) is not None:
        return ["h" if k == 1 else f"h^{k}"], [TotalCochain.from_cech(hyperplane_power(X, k))]
    cocycles = de_rham_cohomology(X, 2 * k).basis.get(2 * k, [])
    return [f"g{k}_{i}" for i in range(len(cocycles))], cocycles


def _combination(names, coords):
    if coords is None:
        return None
    terms = [(n, c) for n, c in zip(names, coords) if c != 0]
    if not terms:
        return "0"
    return " + ".join(n if c == 1 else f"{c}·{n}" for n, c in terms)


# ---------------------------------------------------------------- commands

def cmd_cohomology(args, doc, ring):
    X = resolve_scheme(args, doc, ring)
    named = named_bundles(doc, X)
    if args.de_rham:
        if args.sheaf is not None:
            raise _input_error("--de-rham does not take --sheaf", "--sheaf", "conflicting_options")
        ns = [args.n] if args.n is not None else list(range(2 * X.dim + 1))
        for n in ns:
            if n < 0:
                raise _input_error("degree must be non-negative", "--n", "bad_degree")
        res = de_rham_cohomology(X, ns, box=args.box, want_basis=args.basis)
        rows = [_group_row(res, n, f"H^{n}_dR({X.name})", args.basis) for n in ns]
        return {"scheme": X.name, "de_rham": True, "groups": rows}
    sheaf_text = args.sheaf if args.sheaf is not None else "O"
    sheaf = parse_sheaf(sheaf_text, X, named)
    qs = [args.q] if args.q is not None else list(range(X.dim + 1))
    for q in qs:
        if q < 0:
            raise _input_error("degree must be non-negative", "--q", "bad_degree")
    res = cech_cohomology(X, sheaf, degrees=qs, box=args.box, want_basis=args.basis)
    rows = [_group_row(res, q, f"H^{q}({X.name}, {sheaf_text})", args.basis) for q in qs]
    return {"scheme": X.name, "sheaf": sheaf_text, "groups": rows}


def _group_row(res, q, label, with_basis):
    row = {"label": label, "degree": q, "rank": res.rank(q), "torsion": list(res.torsion(q)),
           "truncated": q in res.truncated}
    if with_basis:
        row["basis"] = [b.describe() for b in res.basis.get(q, [])]
    return row


def cmd_chern(args, doc, ring):
    X = resolve_scheme(args, doc, ring)
    named = named_bundles(doc, X)
    if args.bundle is None:
        raise _input_error("--bundle is required", "--bundle", "missing_bundle")
    E = resolve_bundle(args.bundle, X, named)
    method = "split" if args.split else args.method
    try:
        c = char_poly(E, method=method)
    except DivisionObstruction as e:
        raise Diagnostic("division_obstruction", f"{e} (--split handles direct sums of line bundles)",
                         "--method", EXIT_COMPUTE) from None
    coeffs = []
    for k in range(1, min(c.top, X.dim) + 1):
        names, basis = _hodge_basis(X, k)
        co = class_coordinates(c.coefficient(k), basis)
        coeffs.append({"k": k, "basis": names, "coordinates": _jsonable(co), "text": _combination(names, co)})
    nonzero = [f"c_{r['k']} = {r['text']}" for r in coeffs if r["text"] != "0"]
    return {"scheme": X.name, "bundle": args.bundle, "rank": E.rank, "method": c.method,
            "coefficients": coeffs, "summary": ", ".join(nonzero) if nonzero else "c = 1"}


def cmd_crystalline(args, doc, ring):
    X = resolve_scheme(args, doc, ring)
    named = named_bundles(doc, X)
    if args.bundle is None:
        raise _input_error("--bundle is required", "--bundle", "missing_bundle")
    E = resolve_bundle(args.bundle, X, named)
    if E.rank != 1:
        raise Diagnostic("rank_not_one", f"the obstruction class needs a line bundle, got rank {E.rank}",
                         "--bundle", EXIT_COMPUTE)
    ob = crystal_obstruction_line(E)
    c1 = c1_de_rham(E)
    names, basis = _de_rham_basis(X, 1)
    a_co, c_co = class_coordinates(ob.de_rham, basis), class_coordinates(c1, basis)
    out = {"scheme": X.name, "bundle": args.bundle, "p": ring.characteristic,
           "alpha": {"coordinates": _jsonable(a_co), "text": _combination(names, a_co)},
           "c1_dR": {"coordinates": _jsonable(c_co), "text": _combination(names, c_co)},
           "closed": ob.is_closed(), "equal": class_equal(ob.de_rham, c1)}
    if args.classes is not None:
        if getattr(X, "projective_dim", None) is None:
            raise _input_error("--classes needs a projective space", "--classes", "conflicting_options")
        alg = DeRhamAlgebra(X)
        h = basis[0]
        classes = [h.scale(ring(n)) for n in args.classes]
        rows = []
        for k, (dp, signed, pos) in enumerate(cris_vs_dr(classes, alg, min(len(classes), X.dim))):
            kn, kb = _de_rham_basis(X, k) if k else (["1"], None)
            def coord(v):
                if k == 0:
                    return _jsonable(class_coordinates(v[0], [alg.one[0]])) if v else [0]
                return _jsonable(class_coordinates(v[2 * k], kb)) if v else [0]
            rows.append({"k": k, "basis": kn, "dp": coord(dp), "signed_k!e_k": coord(signed),
                         "k!e_k": coord(pos), "matches_signed": alg.eq(dp, signed),
                         "matches_unsigned": alg.eq(dp, pos)})
        out["split_classes"] = list(args.classes)
        out["dp_series"] = rows
    return out


def cmd_selftest(args, doc, ring):
    reports = run_suites(args.suite, seed=args.seed, iterations=args.iterations)
    suites = []
    for rep in reports:
        suites.append({"suite": rep.suite, "seed": rep.seed, "passed": rep.passed,
                       "checks": [c.as_dict() for c in rep.checks]})
    return {"suites": suites, "passed": all(s["passed"] for s in suites)}


COMMANDS = {"cohomology": cmd_cohomology, "chern": cmd_chern, "crystalline": cmd_crystalline,
            "selftest": cmd_selftest}


# ---------------------------------------------------------------- text rendering

def render_text(report):
    cmd, res = report["command"], report["results"]
    lines = []
    if "error" in report:
        e = report["error"]
        where = f" at {e['location']}" if e.get("location") else ""
        return f"error [{e['code']}]{where}: {e['message']}"
    if cmd == "cohomology":
        for g in res["groups"]:
            tors = f", torsion {g['torsion']}" if g["torsion"] else ""
            cut = " (truncated: classes reach the edge of the weight box)" if g["truncated"] else ""
            lines.append(f"{g['label']} over {report['base']}: rank {g['rank']}{tors}{cut}")
            for b in g.get("basis", []):
                lines.append("  basis: " + b.replace("\n", "\n         "))
    elif cmd == "chern":
        lines.append(f"c({res['bundle']}) on {res['scheme']} over {report['base']} [{res['method']}]: "
                     f"{res['summary']}")
    elif cmd == "crystalline":
        lines.append(f"alpha({res['bundle']}) = {res['alpha']['text']}")
        lines.append(f"c_1^dR({res['bundle']}) = {res['c1_dR']['text']}")
        lines.append(f"verdict: {'equal' if res['equal'] else 'different'}")
        for r in res.get("dp_series", []):
            lines.append(f"k={r['k']}: dp {r['dp']}, (-1)^k k! e_k {r['signed_k!e_k']}, k! e_k {r['k!e_k']}")
    elif cmd == "selftest":
        for s in res["suites"]:
            for c in s["checks"]:
                if not c["passed"]:
                    lines.append(f"FAIL {s['suite']}: {c['name']} {c['detail']}".rstrip())
            n = len(s["checks"])
            good = sum(c["passed"] for c in s["checks"])
            lines.append(f"{s['suite']} (seed {s['seed']}): {good}/{n} passed")
    return "\n".join(lines)


# ---------------------------------------------------------------- entry point

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="JSON scheme/bundle document")
    common.add_argument("--scheme", help="built-in scheme (P1, P2, A1, ...)")
    common.add_argument("--base", help="base ring: Z, Q or Fp:p")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--no-timing", action="store_true", help="report timing_ms as null")

    ap = argparse.ArgumentParser(prog="dchern", description="Chern classes via Cech and divided-power computations")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cohomology", parents=[common], help="sheaf or de Rham cohomology")
    c.add_argument("--sheaf", help='e.g. "O(-2)", "Omega^1", "Omega^1(2)", "End O(1)+O(2)"')
    c.add_argument("--q", type=int, help="cohomological degree (default: all)")
    c.add_argument("--de-rham", action="store_true")
    c.add_argument("--n", type=int, help="de Rham degree (default: all)")
    c.add_argument("--box", type=int, help="weight box radius")
    c.add_argument("--basis", action=argparse.BooleanOptionalAction, default=True)

    c = sub.add_parser("chern", parents=[common], help="characteristic polynomial of a bundle")
    c.add_argument("--bundle")
    c.add_argument("--method", choices=("auto", "newton", "split"), default="auto")
    c.add_argument("--split", action="store_true", help="same as --method split")

    c = sub.add_parser("crystalline", parents=[common], help="crystalline obstruction of a line bundle")
    c.add_argument("--bundle")
    c.add_argument("--p", type=int)
    c.add_argument("--classes", type=lambda s: [int(x) for x in s.split(",") if x.strip()],
                   help="split classes as multiples of the generator, e.g. 1,2")

    c = sub.add_parser("selftest", parents=[common], help="seeded property suites")
    c.add_argument("--suite", choices=tuple(SUITES) + ("all",), default="all")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--iterations", type=int)
    return ap


def _base_name(ring):
    return "Q" if ring.characteristic == 0 and ring.is_field else ("Z" if ring.characteristic == 0
                                                                    else f"Fp:{ring.characteristic}")


def run(argv=None):
    """Parse, compute and return ``(report dict, exit status)``."""
    ap = build_parser()
    args = ap.parse_args(argv)
    report = {"command": args.command, "base": None, "results": None, "timing_ms": None, "version": __version__}
    start = time.perf_counter()
    status = EXIT_OK
    try:
        doc = load_document(args.input)
        if args.command == "crystalline":
            if args.p is None and args.base is None and "base" not in doc:
                raise _input_error("--p is required", "--p", "missing_prime")
            if args.p is not None:
                if args.base is not None and make_ring(args.base).characteristic != args.p:
                    raise _input_error(f"--base {args.base} conflicts with --p {args.p}", "--p", "conflicting_options")
                args.base = f"Fp:{args.p}"
        ring = resolve_ring(args, doc)
        if args.command == "crystalline" and ring.characteristic == 0:
            raise _input_error("the crystalline side needs a base F_p", "--base", "bad_base")
        report["base"] = _base_name(ring)
        report["results"] = COMMANDS[args.command](args, doc, ring)
        if args.command == "selftest" and not report["results"]["passed"]:
            status = EXIT_SELFTEST
    except Diagnostic as e:
        report["error"] = e.as_dict()
        status = e.status
    except (DivisionObstruction, CrystallineError, GuardError, NotGradable, CohomologyError, CochainError,
            ArithmeticError) as e:
        report["error"] = {"code": type(e).__name__, "message": str(e), "location": None}
        status = EXIT_COMPUTE
    except (SchemeError, ValueError) as e:
        report["error"] = {"code": "invalid_input", "message": str(e), "location": None}
        status = EXIT_INPUT
    except Exception as e:  # never crash: report unexpected failures as computation errors
        report["error"] = {"code": "internal_error", "message": f"{type(e).__name__}: {e}", "location": None}
        status = EXIT_COMPUTE
    if not args.no_timing:
        report["timing_ms"] = round((time.perf_counter() - start) * 1000, 3)
    return report, status, args.format


def main(argv=None):
    report, status, fmt = run(argv)
    if fmt == "json":
        text = json.dumps(report, sort_keys=True, ensure_ascii=False, indent=2)
    else:
        text = render_text(report)
    stream = sys.stderr if "error" in report else sys.stdout
    print(text, file=stream)
    return status


if __name__ == "__main__":
    sys.exit(main())
