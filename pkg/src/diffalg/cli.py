"""Command-line interface: subcommand dispatch, JSON verdict reports with
substitution-verified certificates, and a newline-delimited batch mode.

Exit codes: 0 = a verdict was produced (including negative verdicts),
1 = parse/usage error, 2 = a degree cap was exceeded, 3 = internal
invariant violation.  The environment variable DIFFALG_DEGREE_CAP overrides
the default degree cap of 200.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import criteria, solver
from .dispersion import (
    additive_standard_decomp,
    dispersion as dispersion_of,
    is_standard,
    multiplicative_standard_form,
    polar_dispersion,
)
from .errors import BoundExceededError, DiffAlgError, InternalVerificationError, ParseError
from .numcore import Rat, RatFun
from .parsing import format_ratfun, parse_matrix, parse_poly, parse_ratfun, parse_vector
from .solver import ScalarDiffEq, Status
from .structures import DiffStructure, apply_sigma, q_structure, shift_structure

SUBCOMMANDS = (
    "disp",
    "standard-form",
    "mult-form",
    "solve-first-order",
    "solve-scalar",
    "solve-system",
    "telescope",
    "da-hypergeom",
    "da-inhomog",
    "integrability",
    "classify-group",
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BOUND = 2
EXIT_INTERNAL = 3


@dataclass
class Query:
    subcommand: str
    case: str = "shift"
    q_value: Rat | None = None
    payload: dict = field(default_factory=dict)
    order_bound: int = 3
    degree_cap: int | None = None

    def structure(self) -> DiffStructure:
        if self.case == "shift":
            return shift_structure()
        if self.case == "q":
            if self.q_value is None:
                raise ParseError("q case requires --q", 0)
            return q_structure(self.q_value)
        raise ParseError(f"unknown case {self.case!r}", 0)


@dataclass
class VerdictReport:
    verdict: str
    certificate: dict | None
    substitution_verified: bool
    hypothesis_notes: str
    timing_ms: int
    subcommand: str
    case: str
    q: str | None

    def to_json_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "case": self.case,
            "q": self.q,
            "verdict": self.verdict,
            "certificate": self.certificate,
            "substitution_verified": self.substitution_verified,
            "hypothesis_notes": self.hypothesis_notes,
            "timing_ms": self.timing_ms,
        }


def _rat_str(v) -> str:
    return str(v)


def _parse_q(text: str) -> Rat:
    f = parse_ratfun(text)
    if not f.is_constant():
        raise ParseError("--q must be a rational constant", 0)
    return f.const_value()


def _solution_space_payload(space: solver.SolutionSpace) -> tuple[str, dict]:
    verdict = {
        Status.SOLVED: "SOLVED",
        Status.NO_SOLUTION: "NO_SOLUTION",
        Status.BOUND_EXCEEDED: "BOUND_EXCEEDED",
    }[space.status]
    cert: dict = {}
    if space.particular is not None:
        g, lam = space.particular
        cert["particular"] = {
            "g": format_ratfun(g),
            "lambda": [_rat_str(v) for v in lam],
        }
    cert["homogeneous_basis"] = [
        {"g": format_ratfun(g), "lambda": [_rat_str(v) for v in lam]}
        for g, lam in space.homogeneous_basis
    ]
    if space.witness:
        cert["witness"] = space.witness
    if space.universal_den is not None:
        cert["universal_denominator"] = format_ratfun(RatFun.from_poly(space.universal_den))
    if space.degree_bound is not None:
        cert["degree_bound"] = space.degree_bound
    return verdict, cert


def _split_exprs(text: str) -> list[str]:
    return [chunk for chunk in (piece.strip() for piece in text.split(";")) if chunk]


def run_query(query: Query) -> tuple[VerdictReport, int]:
    """Dispatch one query; returns (report, exit_code)."""
    start = time.monotonic()
    ds = query.structure()
    payload = query.payload
    cap = query.degree_cap
    verdict = "ERROR"
    cert: dict | None = None
    verified = False
    notes = ""

    def need(key: str) -> str:
        if key not in payload or payload[key] is None:
            raise ParseError(f"missing required argument --{key.replace('_', '-')}", 0)
        return payload[key]

    sub = query.subcommand
    if sub == "disp":
        verdict = "DISPERSION"
        cert = {}
        if payload.get("poly"):
            p = parse_poly(payload["poly"])
            cert["dispersion"] = dispersion_of(ds, p)
        if payload.get("f"):
            f = parse_ratfun(payload["f"])
            cert["polar_dispersion"] = polar_dispersion(ds, f)
            if not f.is_zero():
                cert["is_standard"] = is_standard(ds, f)
        if not cert:
            raise ParseError("disp needs --poly or --f", 0)
        verified = True
    elif sub == "standard-form":
        f = parse_ratfun(need("f"))
        a = parse_ratfun(payload.get("a") or "1")
        if not a.is_constant():
            raise ParseError("--a must be a rational constant", 0)
        decomp = additive_standard_decomp(ds, f, a.const_value())
        verified = decomp.reconstruct() == f
        verdict = "STANDARD_DECOMP"
        cert = {
            "standard_part": format_ratfun(decomp.standard_part),
            "certificate_g": format_ratfun(decomp.certificate_g),
            "twist_a": _rat_str(decomp.twist_a),
        }
    elif sub == "mult-form":
        f = parse_ratfun(need("f"))
        mform = multiplicative_standard_form(ds, f)
        verified = mform.reconstruct() == f
        verdict = "MULT_STANDARD_FORM"
        cert = {
            "standard_part": format_ratfun(mform.standard_part),
            "certificate_g": format_ratfun(mform.certificate_g),
        }
    elif sub == "solve-first-order":
        a = parse_ratfun(need("a"))
        basis, fixed = _rhs_arguments(payload)
        space = solver.solve_first_order(ds, a, rhs_basis=basis, lambda_fixed=fixed, degree_cap=cap)
        verdict, cert = _solution_space_payload(space)
        verified = space.is_solved()
    elif sub == "solve-scalar":
        coeffs = [parse_poly(p) for p in _split_exprs(need("coeffs"))]
        basis, fixed = _rhs_arguments(payload)
        eq = ScalarDiffEq(ds, tuple(coeffs), tuple(basis), fixed)
        space = solver.solve_scalar(eq, degree_cap=cap)
        verdict, cert = _solution_space_payload(space)
        verified = space.is_solved()
    elif sub == "solve-system":
        m = parse_matrix(need("matrix"))
        rhs_vec = (
            parse_vector(payload["rhs_vector"])
            if payload.get("rhs_vector")
            else [RatFun.zero()] * m.n
        )
        space = solver.solve_system(ds, m, rhs_vec, degree_cap=cap)
        verdict = {
            Status.SOLVED: "SOLVED",
            Status.NO_SOLUTION: "NO_SOLUTION",
            Status.BOUND_EXCEEDED: "BOUND_EXCEEDED",
        }[space.status]
        cert = {}
        if space.particular is not None:
            cert["particular"] = [format_ratfun(v) for v in space.particular]
        cert["homogeneous_basis"] = [
            [format_ratfun(v) for v in vec] for vec in space.homogeneous_basis
        ]
        if space.witness:
            cert["witness"] = space.witness
        verified = space.is_solved()
    elif sub == "telescope":
        funcs = [parse_ratfun(t) for t in _split_exprs(need("funcs"))]
        tele = criteria.find_telescoper(ds, funcs, query.order_bound, degree_cap=cap)
        if tele is None:
            verdict = "NO_TELESCOPER"
            notes = f"no telescoper of order <= {query.order_bound}; not a transcendence proof"
        else:
            verified = criteria.verify_telescoper(ds, funcs, tele)
            verdict = "TELESCOPER_FOUND"
            cert = {
                "operators": [[_rat_str(c) for c in op.coeffs] for op in tele.operators],
                "certificate_g": format_ratfun(tele.certificate_g),
            }
    elif sub == "da-hypergeom":
        b = parse_ratfun(need("b"))
        v = criteria.hypergeom_da_test(ds, b)
        verdict = _da_verdict_code(v)
        notes = v.hypothesis_notes
        if v.certificate is not None:
            cert = _da_certificate_dict(v)
            verified = _reverify_hypergeom(ds, b, v)
    elif sub == "da-inhomog":
        a = parse_ratfun(need("a"))
        b = parse_ratfun(need("b"))
        v = criteria.inhomog_da_classify(ds, a, b, degree_cap=cap)
        verdict = _da_verdict_code(v)
        notes = v.hypothesis_notes
        if v.certificate is not None:
            cert = _da_certificate_dict(v)
            verified = _reverify_inhomog(ds, a, b, v)
    elif sub == "integrability":
        m = parse_matrix(need("matrix"))
        result = criteria.integrability_test(ds, m, degree_cap=cap)
        if result.status is criteria.IntegrabilityStatus.CONSTANT_CONJUGATE:
            verdict = "CONSTANT_CONJUGATE"
            cert = {"B": [[format_ratfun(v) for v in row] for row in result.b_matrix.entries]}
            verified = _reverify_integrability(ds, m, result.b_matrix)
        else:
            verdict = "NOT_CONSTANT_CONJUGATE"
            cert = {}
            if result.scalar_trace is not None:
                cert["scalar_trace"] = {
                    "coeffs": [format_ratfun(RatFun.from_poly(p)) for p in result.scalar_trace.coeffs],
                    "rhs": [format_ratfun(r) for r in result.scalar_trace.rhs_basis],
                }
    elif sub == "classify-group":
        f = parse_ratfun(need("f"))
        g = criteria.group_classify_inhomog_sum(ds, f, degree_cap=cap)
        verdict = {
            criteria.GroupKind.TRIVIAL: "TRIVIAL",
            criteria.GroupKind.CONSTANTS_GA: "CONSTANTS_GA",
            criteria.GroupKind.FULL_GA: "FULL_GA",
        }[g.kind]
        if g.certificate_h is not None:
            cert = {"h": format_ratfun(g.certificate_h)}
            expected = apply_sigma(ds, g.certificate_h) - g.certificate_h
            if g.certificate_c is not None:
                cert["c"] = _rat_str(g.certificate_c)
                expected = expected + RatFun.const(g.certificate_c)
            verified = expected == f
    else:
        raise ParseError(f"unknown subcommand {sub!r}", 0)

    elapsed_ms = int((time.monotonic() - start) * 1000)
    report = VerdictReport(
        verdict=verdict,
        certificate=cert,
        substitution_verified=verified,
        hypothesis_notes=notes,
        timing_ms=elapsed_ms,
        subcommand=sub,
        case=query.case,
        q=_rat_str(query.q_value) if query.q_value is not None else None,
    )
    return report, EXIT_BOUND if verdict == "BOUND_EXCEEDED" else EXIT_OK


def _rhs_arguments(payload) -> tuple[list[RatFun], tuple | None]:
    """--rhs is a fixed right-hand side (lambda pinned to 1); --rhs-basis
    adds free-lambda basis functions."""
    basis: list[RatFun] = []
    fixed: list = []
    if payload.get("rhs"):
        basis.append(parse_ratfun(payload["rhs"]))
        fixed.append(Rat(1))
    for chunk in _split_exprs(payload.get("rhs_basis") or ""):
        basis.append(parse_ratfun(chunk))
        fixed.append(None)
    if not basis:
        return [], None
    return basis, tuple(fixed)


def _da_verdict_code(v: criteria.DAVerdict) -> str:
    return {
        criteria.DAStatus.DIFFERENTIALLY_ALGEBRAIC: "DIFFERENTIALLY_ALGEBRAIC",
        criteria.DAStatus.DIFFERENTIALLY_TRANSCENDENTAL: "DIFFERENTIALLY_TRANSCENDENTAL",
        criteria.DAStatus.RATIONAL_SOLUTION_EXISTS: "RATIONAL_SOLUTION_EXISTS",
    }[v.status]


def _da_certificate_dict(v: criteria.DAVerdict) -> dict:
    cert = {}
    c = v.certificate
    if c.f is not None:
        cert["f"] = format_ratfun(c.f)
    if c.c is not None:
        cert["c"] = _rat_str(c.c)
    if c.n_or_r is not None:
        cert["n_or_r"] = c.n_or_r
    if c.d is not None:
        cert["d"] = _rat_str(c.d)
    return cert


def _reverify_hypergeom(ds, b, v) -> bool:
    c = v.certificate
    if v.status is not criteria.DAStatus.DIFFERENTIALLY_ALGEBRAIC:
        return False
    n = c.n_or_r or 0
    xn = RatFun.x() ** n if n >= 0 else RatFun.one() / (RatFun.x() ** (-n))
    return RatFun.const(c.c) * xn * apply_sigma(ds, c.f) / c.f == b


def _reverify_inhomog(ds, a, b, v) -> bool:
    c = v.certificate
    if v.status is criteria.DAStatus.RATIONAL_SOLUTION_EXISTS:
        return apply_sigma(ds, c.f) - a * c.f == b
    if v.status is not criteria.DAStatus.DIFFERENTIALLY_ALGEBRAIC:
        return False
    expected = apply_sigma(ds, c.f) - a * c.f
    if c.d is not None:
        r = c.n_or_r or 0
        xr = RatFun.x() ** r if r >= 0 else RatFun.one() / (RatFun.x() ** (-r))
        expected = expected + RatFun.const(c.d) * xr
    return expected == b


def _reverify_integrability(ds, a_matrix, b_matrix) -> bool:
    from .structures import apply_derivation

    a_inv = a_matrix.inverse()
    da = a_matrix.map(lambda f: apply_derivation(ds, f))
    lhs = b_matrix.map(lambda f: apply_sigma(ds, f))
    rhs = (a_matrix @ b_matrix) @ a_inv
    inhom = da @ a_inv
    return all(
        lhs.entries[r][s] == rhs.entries[r][s] + inhom.entries[r][s]
        for r in range(a_matrix.n)
        for s in range(a_matrix.n)
    )


# ---------------------------------------------------------------------------
# argument handling
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffalg",
        description="Differential-transcendence decision procedures for linear "
        "(q-)difference equations over Q(x), with machine-checkable certificates.",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp):
        sp.add_argument("--case", choices=["shift", "q"], default="shift")
        sp.add_argument("--q", default=None, help="rational q for the q case, e.g. 1/4")
        sp.add_argument("--degree-cap", type=int, default=None)

    sp = subparsers.add_parser("disp", help="dispersion / polar dispersion / standardness")
    common(sp)
    sp.add_argument("--poly", default=None)
    sp.add_argument("--f", default=None)

    sp = subparsers.add_parser("standard-form", help="additive standard decomposition")
    common(sp)
    sp.add_argument("--f", required=True)
    sp.add_argument("--a", default="1", help="constant twist (default 1)")

    sp = subparsers.add_parser("mult-form", help="multiplicative standard form")
    common(sp)
    sp.add_argument("--f", required=True)

    sp = subparsers.add_parser("solve-first-order", help="sigma(g) - a*g = rhs")
    common(sp)
    sp.add_argument("--a", required=True)
    sp.add_argument("--rhs", default=None, help="fixed right-hand side")
    sp.add_argument("--rhs-basis", default=None, help="semicolon-separated free basis")

    sp = subparsers.add_parser("solve-scalar", help="sum p_i sigma^i(y) = rhs")
    common(sp)
    sp.add_argument("--coeffs", required=True, help="semicolon-separated p_0;...;p_m")
    sp.add_argument("--rhs", default=None)
    sp.add_argument("--rhs-basis", default=None)

    sp = subparsers.add_parser("solve-system", help="sigma(v) = M v + c")
    common(sp)
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--rhs-vector", default=None, help="[e1, ..., en]")

    sp = subparsers.add_parser("telescope", help="constant-operator telescoper search")
    common(sp)
    sp.add_argument("--funcs", required=True, help="semicolon-separated inputs a_1;...;a_n")
    sp.add_argument("--order-bound", type=int, default=3)

    sp = subparsers.add_parser("da-hypergeom", help="sigma(u) = b*u differential algebraicity")
    common(sp)
    sp.add_argument("--b", required=True)

    sp = subparsers.add_parser("da-inhomog", help="sigma(z) = a*z + b classification")
    common(sp)
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)

    sp = subparsers.add_parser("integrability", help="sigma(B) = A B A^-1 + d(A) A^-1 test")
    common(sp)
    sp.add_argument("--matrix", required=True)

    sp = subparsers.add_parser("classify-group", help="group of sigma(y) - y = f")
    common(sp)
    sp.add_argument("--f", required=True)

    sp = subparsers.add_parser("batch", help="run newline-delimited JSON queries")
    sp.add_argument("path")
    sp.add_argument("--workers", type=int, default=4)
    return parser


_PAYLOAD_KEYS = ("poly", "f", "a", "b", "rhs", "rhs_basis", "coeffs", "matrix", "rhs_vector", "funcs")


def _query_from_namespace(ns: argparse.Namespace) -> Query:
    payload = {k: getattr(ns, k) for k in _PAYLOAD_KEYS if hasattr(ns, k)}
    return Query(
        subcommand=ns.subcommand,
        case=getattr(ns, "case", "shift"),
        q_value=_parse_q(ns.q) if getattr(ns, "q", None) else None,
        payload=payload,
        order_bound=getattr(ns, "order_bound", 3),
        degree_cap=getattr(ns, "degree_cap", None),
    )


def query_from_dict(obj: dict) -> Query:
    if not isinstance(obj, dict):
        raise ParseError("batch line must be a JSON object", 0)
    sub = obj.get("subcommand")
    if sub not in SUBCOMMANDS:
        raise ParseError(f"unknown subcommand {sub!r}", 0)
    payload = {k: obj[k] for k in _PAYLOAD_KEYS if k in obj}
    q_raw = obj.get("q")
    return Query(
        subcommand=sub,
        case=obj.get("case", "shift"),
        q_value=_parse_q(str(q_raw)) if q_raw is not None else None,
        payload=payload,
        order_bound=int(obj.get("order_bound", 3)),
        degree_cap=obj.get("degree_cap"),
    )


def run_batch(path: str, workers: int = 4) -> tuple[list[dict], int]:
    """Run newline-delimited JSON queries; one report per input line, order
    preserved, independent queries executed concurrently."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()

    jobs = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            jobs.append(None)
            continue
        jobs.append((lineno, line))

    def work(job):
        if job is None:
            return None
        lineno, line = job
        try:
            query = query_from_dict(json.loads(line))
            report, _ = run_query(query)
            return report.to_json_dict()
        except (DiffAlgError, json.JSONDecodeError, ValueError, ZeroDivisionError) as exc:
            return {"error": {"line": lineno, "message": str(exc)}}

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(work, jobs))
    reports = [r for r in results if r is not None]
    exit_code = EXIT_OK if all("error" not in r for r in reports) else EXIT_USAGE
    return reports, exit_code


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        if ns.subcommand == "batch":
            reports, code = run_batch(ns.path, ns.workers)
            for report in reports:
                print(json.dumps(report))
            return code
        query = _query_from_namespace(ns)
        report, code = run_query(query)
        print(json.dumps(report.to_json_dict()))
        return code
    except ParseError as exc:
        print(json.dumps({"error": {"message": str(exc), "kind": "parse"}}), file=sys.stderr)
        return EXIT_USAGE
    except BoundExceededError as exc:
        print(json.dumps({"error": {"message": str(exc), "kind": "bound-exceeded"}}), file=sys.stderr)
        return EXIT_BOUND
    except InternalVerificationError as exc:
        print(json.dumps({"error": {"message": str(exc), "kind": "internal"}}), file=sys.stderr)
        return EXIT_INTERNAL
    except DiffAlgError as exc:
        print(json.dumps({"error": {"message": str(exc), "kind": "usage"}}), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
