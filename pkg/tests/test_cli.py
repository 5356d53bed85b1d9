"""Expression parsing, query dispatch, JSON reports, batch mode, exit codes."""

import json
import os
import random
import subprocess
import sys

import pytest

from conftest import SHIFT, Q2, rand_ratfun, rf
from diffalg import ParseError, Poly, Rat, RatFun, format_ratfun, parse_matrix, parse_ratfun
from diffalg.cli import EXIT_BOUND, EXIT_OK, EXIT_USAGE, Query, main, query_from_dict, run_batch, run_query

SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "..", "src", "diffalg", "verdict_report.schema.json")


class TestParser:
    def test_simple_pole(self):
        f = parse_ratfun("1/x")
        assert f == RatFun(Poly.one(), Poly.x())

    def test_fixture_coefficient(self):
        f = parse_ratfun("(x-1)/(4*x-1)")
        assert f.num == Poly([Rat(-1, 4), Rat(1, 4)])  # monic denominator normalisation
        assert f.den == Poly([Rat(-1, 4), 1])

    def test_mixed_rational(self):
        assert parse_ratfun("x^2 + 1/2") == RatFun(Poly([1, 0, 2]), Poly([2]))

    def test_whitespace_insensitive(self):
        assert parse_ratfun(" x ^ 2+ 1 / 2 ") == parse_ratfun("x^2+1/2")

    def test_precedence(self):
        assert parse_ratfun("2*x^2") == rf("2*(x^2)")
        assert parse_ratfun("-x^2") == -rf("x^2")
        assert parse_ratfun("1 - 2/x") == rf("(x-2)/x")

    def test_negative_exponent(self):
        assert parse_ratfun("x^-2") == rf("1/x^2")

    def test_error_position(self):
        with pytest.raises(ParseError) as err:
            parse_ratfun("x + $")
        assert err.value.position == 4

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse_ratfun("x + 1) * 2")

    def test_division_by_zero_literal(self):
        with pytest.raises(ParseError):
            parse_ratfun("1/(x - x)")

    def test_matrix(self):
        m = parse_matrix("[[0,-1],[1,x]]")
        assert m.n == 2
        assert m.entries[1][1] == rf("x")

    def test_matrix_must_be_square(self):
        with pytest.raises(ParseError):
            parse_matrix("[[1,2,3],[4,5,6]]")

    def test_print_parse_roundtrip_fuzz(self):
        rng = random.Random(501)
        for _ in range(200):
            ds = SHIFT if rng.random() < 0.5 else Q2
            f = rand_ratfun(rng, ds)
            assert parse_ratfun(format_ratfun(f)) == f


def _query(sub: str, case: str = "shift", q: str | None = None, **payload) -> Query:
    return Query(
        subcommand=sub,
        case=case,
        q_value=Rat(*map(int, q.split("/"))) if q and "/" in q else (Rat(int(q)) if q else None),
        payload=payload,
        order_bound=payload.pop("order_bound", 3) if "order_bound" in payload else 3,
    )


class TestRunQuery:
    def test_gamma_ratio(self):
        report, code = run_query(_query("da-hypergeom", b="x"))
        assert report.verdict == "DIFFERENTIALLY_TRANSCENDENTAL"
        assert code == EXIT_OK

    def test_group_full_ga(self):
        report, code = run_query(_query("classify-group", case="q", q="2", f="1/(x-1)"))
        assert report.verdict == "FULL_GA"
        assert code == EXIT_OK

    def test_integrability_negative(self):
        report, code = run_query(_query("integrability", matrix="[[0,-1],[1,x]]"))
        assert report.verdict == "NOT_CONSTANT_CONJUGATE"
        assert code == EXIT_OK

    def test_positive_verdicts_are_substitution_verified(self):
        cases = [
            _query("da-hypergeom", b="3*(x+1)/x"),
            _query("da-inhomog", a="2", b="1"),
            _query("classify-group", f="1"),
            _query("classify-group", case="q", q="2", f="2*x - x + 1"),
            _query("standard-form", f="1/x + 1/(x+2)", a="1"),
            _query("mult-form", f="(x+1)/x"),
            _query("solve-first-order", a="2", rhs="1"),
            _query("integrability", matrix="[[1,0],[0,1]]"),
            _query("telescope", funcs="1/x - 1/(x+1)"),
        ]
        for q in cases:
            report, code = run_query(q)
            assert code == EXIT_OK
            assert report.substitution_verified, (q.subcommand, report.verdict)

    def test_bound_exceeded_exit_code(self):
        q = _query("solve-scalar", coeffs="1;1", rhs="x^3")
        q.degree_cap = 0
        report, code = run_query(q)
        assert report.verdict == "BOUND_EXCEEDED"
        assert code == EXIT_BOUND

    def test_reports_validate_against_schema(self):
        jsonschema = pytest.importorskip("jsonschema")
        with open(SCHEMA_PATH) as fh:
            schema = json.load(fh)
        queries = [
            _query("da-hypergeom", b="x"),
            _query("da-hypergeom", case="q", q="2", b="5*x^3"),
            _query("disp", f="1/x + 1/(x+2)"),
            _query("disp", poly="x*(x+3)"),
            _query("standard-form", f="1/x - 1/(x+1)"),
            _query("mult-form", f="x"),
            _query("solve-first-order", a="1", rhs="1/x"),
            _query("solve-scalar", coeffs="-1;1", rhs="1/(x*(x+1))"),
            _query("solve-system", matrix="[[1,0],[0,1]]"),
            _query("telescope", funcs="1/x"),
            _query("da-inhomog", a="x", b="1"),
            _query("integrability", matrix="[[0,-1],[1,x]]"),
            _query("classify-group", f="1/x"),
        ]
        for q in queries:
            report, _ = run_query(q)
            jsonschema.validate(report.to_json_dict(), schema)

    def test_deterministic_output(self):
        a = run_query(_query("da-hypergeom", b="3*(x+1)/x"))[0].to_json_dict()
        b = run_query(_query("da-hypergeom", b="3*(x+1)/x"))[0].to_json_dict()
        a.pop("timing_ms")
        b.pop("timing_ms")
        assert json.dumps(a) == json.dumps(b)
        assert list(a.keys()) == [
            "subcommand",
            "case",
            "q",
            "verdict",
            "certificate",
            "substitution_verified",
            "hypothesis_notes",
        ]


class TestBatch:
    def test_three_queries_order_preserved(self, tmp_path):
        lines = [
            {"subcommand": "da-hypergeom", "case": "shift", "b": "x"},
            {"subcommand": "classify-group", "case": "q", "q": "2", "f": "1/(x-1)"},
            {"subcommand": "integrability", "case": "shift", "matrix": "[[0,-1],[1,x]]"},
        ]
        path = tmp_path / "batch.jsonl"
        path.write_text("\n".join(json.dumps(l) for l in lines) + "\n")
        reports, code = run_batch(str(path))
        assert code == EXIT_OK
        assert [r["verdict"] for r in reports] == [
            "DIFFERENTIALLY_TRANSCENDENTAL",
            "FULL_GA",
            "NOT_CONSTANT_CONJUGATE",
        ]
        assert [r["subcommand"] for r in reports] == [l["subcommand"] for l in lines]

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        reports, code = run_batch(str(path))
        assert reports == []
        assert code == EXIT_OK

    def test_malformed_line_isolated(self, tmp_path):
        path = tmp_path / "mixed.jsonl"
        path.write_text(
            json.dumps({"subcommand": "da-hypergeom", "b": "x"})
            + "\nthis is not json\n"
            + json.dumps({"subcommand": "classify-group", "f": "1"})
            + "\n"
        )
        reports, code = run_batch(str(path))
        assert code == EXIT_USAGE
        assert reports[0]["verdict"] == "DIFFERENTIALLY_TRANSCENDENTAL"
        assert "error" in reports[1]
        assert reports[1]["error"]["line"] == 2
        assert reports[2]["verdict"] == "TRIVIAL"

    def test_concurrent_execution_matches_serial(self, tmp_path):
        lines = [{"subcommand": "da-hypergeom", "case": "shift", "b": f"{k}*(x+1)/x"} for k in range(1, 9)]
        path = tmp_path / "many.jsonl"
        path.write_text("\n".join(json.dumps(l) for l in lines))
        serial, _ = run_batch(str(path), workers=1)
        parallel, _ = run_batch(str(path), workers=8)
        for a, b in zip(serial, parallel):
            a.pop("timing_ms")
            b.pop("timing_ms")
        assert serial == parallel


class TestMainEntry:
    def test_usage_error_exit_code(self):
        assert main(["da-hypergeom", "--b", "x +"]) == EXIT_USAGE

    def test_q_unit_modulus_rejected(self, capsys):
        code = main(["da-hypergeom", "--case", "q", "--q", "1", "--b", "x"])
        assert code == EXIT_USAGE
        err = capsys.readouterr().err
        assert "|q|" in err or "q" in err

    def test_console_script_end_to_end(self):
        proc = subprocess.run(
            [sys.executable, "-m", "diffalg.cli", "da-hypergeom", "--case", "shift", "--b", "x"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert payload["verdict"] == "DIFFERENTIALLY_TRANSCENDENTAL"

    def test_degree_cap_env_var(self):
        env = dict(os.environ, DIFFALG_DEGREE_CAP="0")
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "diffalg.cli",
                "solve-scalar",
                "--coeffs",
                "1;1",
                "--rhs",
                "x^3",
            ],
            capture_output=True,
            text=True,
            env=env,
        )
        assert proc.returncode == EXIT_BOUND
        assert json.loads(proc.stdout)["verdict"] == "BOUND_EXCEEDED"

    def test_query_from_dict_rejects_unknown(self):
        with pytest.raises(ParseError):
            query_from_dict({"subcommand": "explode"})
