"""Exact arithmetic core: rationals, dense univariate polynomials, reduced
rational functions, and the gcd / resultant / root primitives everything else
consumes.

All coefficients live in Q.  The ``Rat`` type is ``gmpy2.mpq`` when gmpy2 is
importable (it is several times faster on the big numerators that show up in
resultants) and ``fractions.Fraction`` otherwise; set
``DIFFALG_RAT_BACKEND=fraction`` to force the stdlib backend.  Both types obey
the same reduced-fraction invariants (gcd(|num|, den) = 1, den > 0) and mix
freely with ints.
"""

from __future__ import annotations

import math
import os
import random
from fractions import Fraction

from .errors import PreconditionError, ZeroInputError

if os.environ.get("DIFFALG_RAT_BACKEND", "").lower() == "fraction":
    Rat = Fraction
else:
    try:
        from gmpy2 import mpq as Rat  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover
        Rat = Fraction  # type: ignore[misc]

RAT_ZERO = Rat(0)
RAT_ONE = Rat(1)


def rat(numerator, denominator=1) -> Rat:
    """Build a Rat from ints, strings like ``"3/4"``, or another rational."""
    return Rat(numerator, denominator) if denominator != 1 else Rat(numerator)


class Poly:
    """Dense univariate polynomial over Q.

    Coefficients are stored lowest degree first with no trailing zeros; the
    zero polynomial has an empty coefficient tuple and degree -1 (the
    sentinel).  Instances are immutable and safe to share between threads.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [Rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "Poly":
        return _PZERO

    @staticmethod
    def one() -> "Poly":
        return _PONE

    @staticmethod
    def x() -> "Poly":
        return _PX

    @staticmethod
    def const(c) -> "Poly":
        return Poly([c])

    @staticmethod
    def monomial(c, n: int) -> "Poly":
        if n < 0:
            raise ValueError("monomial exponent must be >= 0")
        return Poly([0] * n + [c])

    # -- basic queries -------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def lc(self) -> Rat:
        if not self.coeffs:
            return RAT_ZERO
        return self.coeffs[-1]

    def __getitem__(self, i: int) -> Rat:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return RAT_ZERO

    def valuation(self) -> int:
        """Order of vanishing at 0; degree+1 convention is avoided: zero
        polynomial returns -1."""
        if not self.coeffs:
            return -1
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return -1  # unreachable

    # -- ring operations -----------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return Poly(out)

    __radd__ = __add__

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return Poly.const(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = Rat(other)
            if c == 0:
                return _PZERO
            return Poly([c * a for a in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return _PZERO
        out = [RAT_ZERO] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = _PONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.degree < other.degree:
            return _PZERO, self
        rem = list(self.coeffs)
        dq = self.degree - other.degree
        quo = [RAT_ZERO] * (dq + 1)
        dlc = other.lc()
        oc = other.coeffs
        for k in range(dq, -1, -1):
            c = rem[other.degree + k] / dlc
            quo[k] = c
            if c != 0:
                for j in range(len(oc)):
                    rem[j + k] -= c * oc[j]
        return Poly(quo), Poly(rem[: other.degree])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ValueError("exact_div with nonzero remainder")
        return q

    # -- calculus / substitution ----------------------------------------

    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def eval(self, point) -> Rat:
        acc = RAT_ZERO
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    def compose_linear(self, a, b) -> "Poly":
        """Return p(a*x + b) via Horner over the polynomial ring."""
        a = Rat(a)
        b = Rat(b)
        lin = Poly([b, a])
        acc = _PZERO
        for c in reversed(self.coeffs):
            acc = acc * lin + Poly.const(c)
        return acc

    def shift_arg(self, c) -> "Poly":
        """p(x + c)."""
        return self.compose_linear(1, c)

    def scale_arg(self, c) -> "Poly":
        """p(c * x)."""
        c = Rat(c)
        power = RAT_ONE
        out = []
        for coeff in self.coeffs:
            out.append(coeff * power)
            power *= c
        return Poly(out)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.lc()
        if lead == 1:
            return self
        return Poly([c / lead for c in self.coeffs])

    def int_clear(self) -> tuple["Poly", Rat]:
        """Return (P, c) with P having coprime integer coefficients and
        self = c * P.  Zero maps to (0, 1)."""
        if self.is_zero():
            return self, RAT_ONE
        den_lcm = 1
        for c in self.coeffs:
            den_lcm = den_lcm * int(c.denominator) // math.gcd(den_lcm, int(c.denominator))
        ints = [int(c.numerator) * (den_lcm // int(c.denominator)) for c in self.coeffs]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        if ints[-1] < 0:
            g = -g
        return Poly([v // g for v in ints]), Rat(g, den_lcm)

    def __repr__(self):
        return f"Poly({format_poly(self)})"


_PZERO = Poly.__new__(Poly)
object.__setattr__(_PZERO, "coeffs", ())
_PONE = Poly.__new__(Poly)
object.__setattr__(_PONE, "coeffs", (RAT_ONE,))
_PX = Poly.__new__(Poly)
object.__setattr__(_PX, "coeffs", (RAT_ZERO, RAT_ONE))


def format_poly(p: Poly, var: str = "x") -> str:
    if p.is_zero():
        return "0"
    parts = []
    for i in range(p.degree, -1, -1):
        c = p[i]
        if c == 0:
            continue
        if i == 0:
            term = str(c)
        else:
            xo = var if i == 1 else f"{var}^{i}"
            if c == 1:
                term = xo
            elif c == -1:
                term = f"-{xo}"
            else:
                term = f"{c}*{xo}"
        parts.append(term)
    out = parts[0]
    for term in parts[1:]:
        out += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
    return out


# ---------------------------------------------------------------------------
# gcd / resultant / factor-free primitives
# ---------------------------------------------------------------------------

GF_PRIME = (1 << 31) - 1


def gf_coeffs(p: Poly, prime: int = GF_PRIME) -> list[int] | None:
    """Coefficients of an integer-cleared image of p mod prime, lowest first;
    None when the reduction degenerates (leading coefficient vanishes)."""
    ip, _ = p.int_clear()
    out = [int(c.numerator) % prime for c in ip.coeffs]
    if not out or out[-1] == 0:
        return None
    return out


def gf_gcd_degree(a: list[int], b: list[int], prime: int = GF_PRIME) -> int:
    """Degree of gcd over GF(prime); inputs are coefficient lists."""

    def deg(v):
        d = len(v) - 1
        while d >= 0 and v[d] == 0:
            d -= 1
        return d

    a, b = list(a), list(b)
    da, db = deg(a), deg(b)
    while db >= 0:
        inv = pow(b[db], prime - 2, prime)
        while da >= db:
            f = a[da] * inv % prime
            if f:
                for i in range(db + 1):
                    a[da - db + i] = (a[da - db + i] - f * b[i]) % prime
            while da >= 0 and a[da] == 0:
                da -= 1
        a, b, da, db = b, a, db, da
    return da


def _gf_coprime(p: Poly, q: Poly) -> bool:
    """True certifies gcd(p, q) = 1: the modular gcd degree only ever exceeds
    the exact one (when neither leading coefficient vanishes mod the prime)."""
    ga = gf_coeffs(p)
    gb = gf_coeffs(q)
    if ga is None or gb is None:
        return False
    return gf_gcd_degree(ga, gb) < 1


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic greatest common divisor; gcd(0, 0) = 0."""
    if not p.is_zero() and not q.is_zero() and p.degree > 0 and q.degree > 0:
        if _gf_coprime(p, q):
            return _PONE
    a, b = p, q
    while not b.is_zero():
        a, b = b, (a % b)
        if not b.is_zero():
            b = b.monic()
    return a.monic()


def poly_lcm(p: Poly, q: Poly) -> Poly:
    if p.is_zero() or q.is_zero():
        return Poly.zero()
    return (p * q).exact_div(poly_gcd(p, q)).monic()


def poly_xgcd(p: Poly, q: Poly) -> tuple[Poly, Poly, Poly]:
    """Extended Euclid: returns (g, s, t) with s*p + t*q = g, g monic."""
    r0, r1 = p, q
    s0, s1 = Poly.one(), Poly.zero()
    t0, t1 = Poly.zero(), Poly.one()
    while not r1.is_zero():
        quo, rem = r0.divmod(r1)
        r0, r1 = r1, rem
        s0, s1 = s1, s0 - quo * s1
        t0, t1 = t1, t0 - quo * t1
    if r0.is_zero():
        return r0, s0, t0
    lead = r0.lc()
    inv = 1 / lead
    return r0.monic(), s0 * inv, t0 * inv


def _prem(a: Poly, b: Poly) -> Poly:
    """Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b, computed without
    fractions appearing (inputs are integer polynomials)."""
    d = a.degree - b.degree
    return (a * (b.lc() ** (d + 1))) % b


def poly_resultant(p: Poly, q: Poly) -> Rat:
    """Resultant with the convention Res(p, q) = lc(p)^deg(q) * prod q(roots of p).

    Computed by the subresultant PRS on integer-cleared inputs to control
    coefficient growth; zero iff p and q share a nonconstant factor.
    """
    if p.is_zero() or q.is_zero():
        raise ZeroInputError("resultant of a zero polynomial")
    if p.degree == 0:
        return p.lc() ** q.degree
    if q.degree == 0:
        return q.lc() ** p.degree
    pa, ca = p.int_clear()
    qa, cb = q.int_clear()
    scale = (ca ** q.degree) * (cb ** p.degree)
    return scale * _int_resultant(pa, qa)


def _int_resultant(a: Poly, b: Poly) -> Rat:
    """Subresultant PRS resultant for primitive integer polynomials."""
    sign = 1
    if a.degree < b.degree:
        if (a.degree & 1) and (b.degree & 1):
            sign = -sign
        a, b = b, a
    g = Rat(1)
    h = Rat(1)
    while True:
        delta = a.degree - b.degree
        if (a.degree & 1) and (b.degree & 1):
            sign = -sign
        rem = _prem(a, b)
        if rem.is_zero():
            # b (nonconstant here) is a factor of a up to a constant
            return RAT_ZERO
        a = b
        b = Poly([c / (g * h ** delta) for c in rem.coeffs])
        g = a.lc()
        h = (g ** delta) / (h ** (delta - 1)) if delta > 0 else h
        if b.degree == 0:
            return _finalize_resultant(sign, h, a, b)


def _finalize_resultant(sign: int, h: Rat, a: Poly, b: Poly) -> Rat:
    if b.degree > 0:
        return RAT_ZERO
    res = (b.lc() ** a.degree) / (h ** (a.degree - 1)) if a.degree > 0 else RAT_ONE
    return sign * res


# -- integer factorization (rational-root candidates only) ------------------


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| (n != 0) as {prime: multiplicity}."""
    if n == 0:
        raise ZeroInputError("factorize(0)")
    n = abs(n)
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while f * f <= n and f < 100_000:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += wheel[i]
        i = (i + 1) % 8
    rng = random.Random(0xD1FFA16)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if _is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_brent(m, rng)
        stack.append(d)
        stack.append(m // d)
    return out


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return divs


def rational_roots(p: Poly) -> set[Rat]:
    """All rational roots of p, each reported once, via the rational-root
    theorem after clearing to coprime integer coefficients."""
    if p.is_zero():
        raise ZeroInputError("rational_roots of the zero polynomial")
    ip, _ = p.int_clear()
    roots: set[Rat] = set()
    v = ip.valuation()
    if v > 0:
        roots.add(RAT_ZERO)
        ip = Poly(ip.coeffs[v:])
    if ip.degree == 0:
        return roots
    a0 = int(ip.coeffs[0].numerator)
    an = int(ip.lc().numerator)
    for r in _divisors(a0):
        for s in _divisors(an):
            if math.gcd(r, s) != 1:
                continue
            cand = Rat(r, s)
            if ip.eval(cand) == 0:
                roots.add(cand)
            if ip.eval(-cand) == 0:
                roots.add(-cand)
    return roots


# -- Sturm sequences: integer roots without factoring ------------------------


def _sturm_chain(p: Poly) -> list[Poly]:
    chain = [p, p.derivative()]
    while not chain[-1].is_zero():
        chain.append(-(chain[-2] % chain[-1]))
    chain.pop()
    return chain


def _sign_changes(chain: list[Poly], point: Rat) -> int:
    signs = []
    for q in chain:
        v = q.eval(point)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _iroot_ceil(n: int, k: int) -> int:
    """Smallest integer r >= 0 with r^k >= n (n >= 0)."""
    if n <= 1:
        return n
    if k == 1:
        return n
    hi = 1 << ((n.bit_length() + k - 1) // k)
    lo = 1
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** k >= n:
            hi = mid
        else:
            lo = mid + 1
    return lo


def root_magnitude_bound(p: Poly) -> Rat:
    """Upper bound on the magnitude of every complex root: the smaller of the
    Cauchy bound and a Fujiwara-style bound 2*max_k (|a_(n-k)|/|a_n|)^(1/k),
    computed exactly with integer k-th roots."""
    if p.is_zero() or p.degree == 0:
        return RAT_ONE
    ip, _ = p.int_clear()
    n = ip.degree
    lead = abs(int(ip.lc().numerator))
    cauchy = 1 + Rat(max(abs(int(c.numerator)) for c in ip.coeffs[:-1]), lead)
    fuji = 0
    for k in range(1, n + 1):
        a = abs(int(ip.coeffs[n - k].numerator))
        if a == 0:
            continue
        ratio_ceil = -(-a // lead)
        fuji = max(fuji, _iroot_ceil(ratio_ceil, k))
    fuji_bound = Rat(2 * fuji + 1)
    return min(cauchy, fuji_bound)


def _floor(r: Rat) -> int:
    return int(r.numerator) // int(r.denominator)


def _ceil(r: Rat) -> int:
    return -(-int(r.numerator) // int(r.denominator))


def integer_roots(p: Poly) -> set[int]:
    """Integer roots of p via Sturm-sequence isolation (no factorization)."""
    if p.is_zero():
        raise ZeroInputError("integer_roots of the zero polynomial")
    if p.degree == 0:
        return set()
    g = poly_gcd(p, p.derivative())
    sqfree = p.exact_div(g) if g.degree > 0 else p
    chain = _sturm_chain(sqfree)
    bound = _floor(root_magnitude_bound(sqfree)) + 1
    roots: set[int] = set()

    def explore(lo: Rat, hi: Rat, v_lo: int, v_hi: int):
        # Sturm: v_lo - v_hi roots in the half-open interval (lo, hi]
        if v_lo - v_hi == 0:
            return
        if hi - lo <= 1:
            for n in range(_ceil(lo), _floor(hi) + 1):
                if p.eval(Rat(n)) == 0:
                    roots.add(n)
            return
        mid = (lo + hi) / 2
        v_mid = _sign_changes(chain, mid)
        explore(lo, mid, v_lo, v_mid)
        explore(mid, hi, v_mid, v_hi)

    lo = Rat(-bound)
    hi = Rat(bound)
    explore(lo, hi, _sign_changes(chain, lo), _sign_changes(chain, hi))
    if p.eval(lo) == 0:
        roots.add(-bound)
    return roots


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: p = lc * prod(factor^mult) with monic, squarefree,
    pairwise-coprime factors."""
    if p.is_zero():
        raise ZeroInputError("squarefree decomposition of zero")
    p = p.monic()
    if p.degree == 0:
        return []
    dp = p.derivative()
    g = poly_gcd(p, dp)
    if g.is_constant():
        return [(p, 1)]
    out = []
    c = p.exact_div(g)
    d = dp.exact_div(g) - c.derivative()
    i = 1
    while c.degree > 0:
        a = poly_gcd(c, d)
        if a.degree > 0:
            out.append((a, i))
        c = c.exact_div(a)
        d = d.exact_div(a) - c.derivative()
        i += 1
    return out


# ---------------------------------------------------------------------------
# RatFun
# ---------------------------------------------------------------------------


class RatFun:
    """Reduced rational function num/den with gcd(num, den) = 1 and den monic.

    Immutable; all arithmetic re-reduces.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _reduced: bool = False):
        if not isinstance(num, Poly):
            num = Poly.const(num) if not isinstance(num, (list, tuple)) else Poly(num)
        if den is None:
            den = _PONE
        elif not isinstance(den, Poly):
            den = Poly.const(den) if not isinstance(den, (list, tuple)) else Poly(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            if num.is_zero():
                den = _PONE
            else:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num = num.exact_div(g)
                    den = den.exact_div(g)
                lead = den.lc()
                if lead != 1:
                    num = num * (1 / lead)
                    den = den.monic()
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RatFun is immutable")

    @staticmethod
    def zero() -> "RatFun":
        return RF_ZERO

    @staticmethod
    def one() -> "RatFun":
        return RF_ONE

    @staticmethod
    def x() -> "RatFun":
        return RF_X

    @staticmethod
    def const(c) -> "RatFun":
        return RatFun(Poly.const(c), _PONE, _reduced=True)

    @staticmethod
    def from_poly(p: Poly) -> "RatFun":
        return RatFun(p, _PONE, _reduced=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def const_value(self) -> Rat:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.lc() if not self.num.is_zero() else RAT_ZERO

    def __eq__(self, other) -> bool:
        if isinstance(other, RatFun):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)) or type(other) is type(RAT_ZERO):
            return self.den == _PONE and self.num == Poly.const(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.num.is_zero()

    @staticmethod
    def _coerce(v) -> "RatFun":
        if isinstance(v, RatFun):
            return v
        if isinstance(v, Poly):
            return RatFun.from_poly(v)
        return RatFun.const(v)

    def __neg__(self) -> "RatFun":
        return RatFun(-self.num, self.den, _reduced=True)

    def __add__(self, other) -> "RatFun":
        other = RatFun._coerce(other)
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RatFun":
        return self + (-RatFun._coerce(other))

    def __rsub__(self, other) -> "RatFun":
        return RatFun._coerce(other) - self

    def __mul__(self, other) -> "RatFun":
        other = RatFun._coerce(other)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFun":
        other = RatFun._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RatFun":
        return RatFun._coerce(other) / self

    def __pow__(self, n: int) -> "RatFun":
        if n < 0:
            return (RF_ONE / self) ** (-n)
        return RatFun(self.num ** n, self.den ** n)

    def derivative(self) -> "RatFun":
        """d/dx via the quotient rule."""
        if self.is_polynomial():
            return RatFun(self.num.derivative(), self.den)
        n, d = self.num, self.den
        return RatFun(n.derivative() * d - n * d.derivative(), d * d)

    def eval(self, point) -> Rat:
        dv = self.den.eval(point)
        if dv == 0:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num.eval(point) / dv

    def poly_part(self) -> tuple[Poly, "RatFun"]:
        """Split into (polynomial part, proper remainder)."""
        if self.is_polynomial():
            return self.num * (1 / self.den.lc()), RF_ZERO
        q, r = self.num.divmod(self.den)
        return q, RatFun(r, self.den, _reduced=True)

    def __repr__(self):
        if self.den == _PONE:
            return f"RatFun({format_poly(self.num)})"
        return f"RatFun(({format_poly(self.num)})/({format_poly(self.den)}))"


RF_ZERO = RatFun.__new__(RatFun)
object.__setattr__(RF_ZERO, "num", _PZERO)
object.__setattr__(RF_ZERO, "den", _PONE)
RF_ONE = RatFun.__new__(RatFun)
object.__setattr__(RF_ONE, "num", _PONE)
object.__setattr__(RF_ONE, "den", _PONE)
RF_X = RatFun.__new__(RatFun)
object.__setattr__(RF_X, "num", _PX)
object.__setattr__(RF_X, "den", _PONE)


def partial_split(f: RatFun, d1: Poly, d2: Poly) -> tuple[RatFun, RatFun]:
    """Split f = f1 + f2 with den(f1) | d1 and den(f2) | d2, given
    den(f) = d1*d2 (up to a constant) and gcd(d1, d2) = 1.

    Any polynomial part is folded into f2.  Computed with extended Euclid, so
    no root isolation is involved.
    """
    if d1.is_zero() or d2.is_zero():
        raise PreconditionError("partial_split with zero modulus")
    prod = (d1 * d2).monic()
    if prod != f.den.monic():
        raise PreconditionError("partial_split: den(f) != d1*d2")
    g, _, t = poly_xgcd(d1, d2)
    if g.degree > 0:
        raise PreconditionError("partial_split: d1, d2 not coprime")
    if d1.is_constant():
        return RF_ZERO, f
    if d2.is_constant():
        q, r = f.poly_part()
        return r, RatFun.from_poly(q)
    # 1 = s*d1 + t*d2  =>  f = n/(d1*d2) = n*t/d1 + n*s/d2 ; reduce n*t mod d1
    n = f.num * (d1 * d2).lc()  # f.den is monic, d1*d2 = lc * f.den
    f1 = RatFun((n * t) % d1, d1)
    f2 = f - f1
    return f1, f2
