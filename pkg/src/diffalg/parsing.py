"""Expression parsing and printing for the CLI.

Grammar: the single variable ``x``, optionally signed integer literals
(rationals are written with the division operator, e.g. ``1/4``), operators
``+ - * / ^`` with the usual precedence, parentheses, and matrices as
bracketed rows of expressions like ``[[0,-1],[1,x]]``.  Whitespace is
ignored.  Printing produces strings that reparse to an identical reduced
rational function.
"""

from __future__ import annotations

from .errors import ParseError
from .numcore import Poly, RatFun, format_poly
from .solver import MatrixRF


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    def expect(self, ch: str):
        got = self.peek()
        if got != ch:
            raise ParseError(f"expected '{ch}', found {got!r}", self.pos)
        self.pos += 1

    def fail(self, message: str):
        raise ParseError(message, self.pos)


def _parse_expr(sc: _Scanner) -> RatFun:
    value = _parse_term(sc)
    while True:
        ch = sc.peek()
        if ch == "+":
            sc.take()
            value = value + _parse_term(sc)
        elif ch == "-":
            sc.take()
            value = value - _parse_term(sc)
        else:
            return value


def _parse_term(sc: _Scanner) -> RatFun:
    value = _parse_unary(sc)
    while True:
        ch = sc.peek()
        if ch == "*":
            sc.take()
            value = value * _parse_unary(sc)
        elif ch == "/":
            sc.take()
            divisor = _parse_unary(sc)
            if divisor.is_zero():
                sc.fail("division by zero")
            value = value / divisor
        else:
            return value


def _parse_unary(sc: _Scanner) -> RatFun:
    sign = 1
    while sc.peek() in ("+", "-"):
        if sc.take() == "-":
            sign = -sign
    value = _parse_power(sc)
    return -value if sign < 0 else value


def _parse_power(sc: _Scanner) -> RatFun:
    base = _parse_atom(sc)
    if sc.peek() == "^":
        sc.take()
        exponent = _parse_exponent(sc)
        if exponent < 0 and base.is_zero():
            sc.fail("zero to a negative power")
        return base ** exponent
    return base


def _parse_exponent(sc: _Scanner) -> int:
    sign = 1
    if sc.peek() == "-":
        sc.take()
        sign = -1
    ch = sc.peek()
    if not ch.isdigit():
        sc.fail("expected an integer exponent")
    digits = []
    while sc.pos < len(sc.text) and sc.text[sc.pos].isdigit():
        digits.append(sc.text[sc.pos])
        sc.pos += 1
    return sign * int("".join(digits))


def _parse_atom(sc: _Scanner) -> RatFun:
    ch = sc.peek()
    if ch == "(":
        sc.take()
        value = _parse_expr(sc)
        sc.expect(")")
        return value
    if ch == "x":
        sc.take()
        return RatFun.x()
    if ch.isdigit():
        digits = []
        while sc.pos < len(sc.text) and sc.text[sc.pos].isdigit():
            digits.append(sc.text[sc.pos])
            sc.pos += 1
        return RatFun.const(int("".join(digits)))
    sc.fail(f"unexpected character {ch!r}" if ch else "unexpected end of input")


def parse_ratfun(text: str) -> RatFun:
    """Parse an expression into an exact reduced rational function."""
    sc = _Scanner(text)
    value = _parse_expr(sc)
    sc.skip_ws()
    if sc.pos != len(sc.text):
        sc.fail(f"trailing input {sc.text[sc.pos:]!r}")
    return value


def parse_poly(text: str) -> Poly:
    f = parse_ratfun(text)
    if not f.is_polynomial():
        raise ParseError("expected a polynomial (no denominator)", 0)
    return f.num * (1 / f.den.lc())


def parse_matrix(text: str) -> MatrixRF:
    """Parse ``[[e, e, ...], ...]`` into a square matrix over Q(x)."""
    sc = _Scanner(text)
    sc.expect("[")
    rows = []
    while True:
        rows.append(_parse_row(sc))
        ch = sc.peek()
        if ch == ",":
            sc.take()
            continue
        sc.expect("]")
        break
    sc.skip_ws()
    if sc.pos != len(sc.text):
        sc.fail(f"trailing input {sc.text[sc.pos:]!r}")
    if any(len(r) != len(rows) for r in rows):
        sc.fail("matrix must be square")
    return MatrixRF(rows)


def parse_vector(text: str) -> list[RatFun]:
    sc = _Scanner(text)
    row = _parse_row(sc)
    sc.skip_ws()
    if sc.pos != len(sc.text):
        sc.fail(f"trailing input {sc.text[sc.pos:]!r}")
    return row


def _parse_row(sc: _Scanner) -> list[RatFun]:
    sc.expect("[")
    entries = []
    while True:
        entries.append(_parse_entry(sc))
        ch = sc.peek()
        if ch == ",":
            sc.take()
            continue
        sc.expect("]")
        return entries


def _parse_entry(sc: _Scanner) -> RatFun:
    # an expression terminated by ',' or ']' at depth zero
    start = sc.pos
    depth = 0
    while sc.pos < len(sc.text):
        ch = sc.text[sc.pos]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and ch in ",]":
            break
        sc.pos += 1
    chunk = sc.text[start : sc.pos]
    if not chunk.strip():
        raise ParseError("empty matrix entry", start)
    try:
        return parse_ratfun(chunk)
    except ParseError as exc:
        raise ParseError(str(exc), start + exc.position) from None


def format_ratfun(f: RatFun) -> str:
    """Canonical text form; reparses to an identical RatFun."""
    num = format_poly(f.num)
    if f.den == Poly.one():
        return num
    return f"({num})/({format_poly(f.den)})"


def format_matrix(m: MatrixRF) -> str:
    rows = [
        "[" + ",".join(format_ratfun(v) for v in row) + "]" for row in m.entries
    ]
    return "[" + ",".join(rows) + "]"
