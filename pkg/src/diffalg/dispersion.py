"""Dispersion analysis and standard-form decompositions.

The dispersion of a polynomial is the largest nonnegative integer L such
that two of its roots differ by L (shift case) or by a factor q^L (q case,
nonzero roots only).  A rational function is *standard* when the combined
zero/pole set has dispersion 0.  The two decomposition routines below push
every pole (resp. zero/pole) orbit onto a single representative position,
producing

    f = standard_part + sigma(g) - a*g          (additive, constant twist a)
    f = standard_part * sigma(g)/g              (multiplicative)

with exact certificates.  Everything is factorization-free: orbits are
detected through gcds of shifted polynomials, and orbit gaps come from
root-magnitude bounds (with an interpolated-resultant fallback for the shift
case when the bounds are large).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalVerificationError, PreconditionError, ZeroInputError
from .numcore import (
    GF_PRIME as _GF_PRIME,
    Poly,
    Rat,
    RatFun,
    gf_coeffs as _gf_coeffs,
    gf_gcd_degree,
    integer_roots,
    partial_split,
    poly_gcd,
    poly_resultant,
    root_magnitude_bound,
    squarefree_decomposition,
)
from .structures import DiffStructure, apply_sigma, sigma_poly

import math

# direct gap scans are capped here; beyond it the shift case falls back to
# integer roots of the interpolated resultant Res_x(Q(x), Q(x+y))
_SCAN_LIMIT = 1024


def _radical(p: Poly) -> Poly:
    g = poly_gcd(p, p.derivative())
    return p.monic() if g.degree == 0 else p.exact_div(g).monic()


def _gf_gcd_degree(a: list[int], b: list[int], prime: int) -> int:
    return gf_gcd_degree(a, b, prime)


def _gf_shift(cs: list[int], h: int, prime: int) -> list[int]:
    """Coefficients of p(x + h) mod prime via Horner."""
    acc: list[int] = []
    for c in reversed(cs):
        # acc = acc*(x+h) + c
        new = [0] * (len(acc) + 1)
        for i, a in enumerate(acc):
            new[i + 1] = (new[i + 1] + a) % prime
            new[i] = (new[i] + a * h) % prime
        new[0] = (new[0] + c) % prime
        acc = new
    return acc


def _gf_scale(cs: list[int], factor: int, prime: int) -> list[int]:
    """Coefficients of p(factor * x) mod prime."""
    out = []
    t = 1
    for c in cs:
        out.append(c * t % prime)
        t = t * factor % prime
    return out


def _gf_q_mod(ds: DiffStructure, prime: int) -> int | None:
    qn = int(ds.q.numerator) % prime
    qd = int(ds.q.denominator) % prime
    if qn == 0 or qd == 0:
        return None
    return qn * pow(qd, prime - 2, prime) % prime


def _shift_gap_candidates(w: Poly) -> list[int]:
    """Positive integers h with gcd(w(x), w(x+h)) nonconstant, w squarefree."""
    if w.degree < 1:
        return []
    bound2 = 2 * root_magnitude_bound(w)
    limit = int(bound2.numerator) // int(bound2.denominator) + 1
    hits: list[int] = []
    if limit <= _SCAN_LIMIT:
        gf = _gf_coeffs(w, _GF_PRIME)
        for h in range(1, limit + 1):
            if gf is not None:
                if _gf_gcd_degree(list(gf), _gf_shift(gf, h, _GF_PRIME), _GF_PRIME) < 1:
                    continue  # mod-p gcd constant certifies the Q-gcd is constant
            if poly_gcd(w, w.shift_arg(h)).degree > 0:
                hits.append(h)
        return hits
    # resultant route: R(y) = Res_x(w(x), w(x+y)) vanishes exactly at the
    # root differences; interpolate R from deg(w)^2 + 1 values
    n = w.degree
    pts = [(Rat(k), poly_resultant(w, w.shift_arg(k))) for k in range(n * n + 1)]
    res_poly = _interpolate(pts)
    if res_poly.is_zero():  # cannot happen for nonzero w; guard anyway
        raise InternalVerificationError("interpolated resultant vanished identically")
    for h in sorted(integer_roots(res_poly)):
        if h >= 1 and poly_gcd(w, w.shift_arg(h)).degree > 0:
            hits.append(h)
    return hits


def _interpolate(points: list[tuple[Rat, Rat]]) -> Poly:
    """Lagrange interpolation through exact points (Newton form)."""
    xs = [p[0] for p in points]
    coeffs = [p[1] for p in points]
    n = len(points)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coeffs[i] = (coeffs[i] - coeffs[i - 1]) / (xs[i] - xs[i - j])
    poly = Poly.zero()
    for i in range(n - 1, -1, -1):
        poly = poly * Poly([-xs[i], 1]) + Poly.const(coeffs[i])
    return poly


def _q_gap_limit(ds: DiffStructure, w: Poly) -> int:
    """Upper bound on L such that alpha and q^L*alpha can both be roots of w
    (w(0) != 0): |q|^L is squeezed between the smallest and largest root
    magnitudes."""
    if w.degree < 1:
        return 0
    hi = root_magnitude_bound(w)
    rev = Poly(list(reversed(w.coeffs)))
    lo = 1 / root_magnitude_bound(rev)  # every root has magnitude >= lo
    ratio = math.log(int(hi.numerator)) - math.log(int(hi.denominator))
    ratio -= math.log(int(lo.numerator)) - math.log(int(lo.denominator))
    q = ds.q
    logq = abs(math.log(abs(int(q.numerator))) - math.log(abs(int(q.denominator))))
    return int(ratio / logq) + 1


def _q_gap_candidates(ds: DiffStructure, w: Poly) -> list[int]:
    """Positive integers h with gcd(w(x), w(q^h x)) nonconstant; w squarefree
    and coprime to x.  A gcd that is constant mod a large prime certifies the
    exact gcd is constant, so only the few surviving candidates pay for exact
    big-rational arithmetic."""
    hits = []
    gf = _gf_coeffs(w, _GF_PRIME)
    qmod = _gf_q_mod(ds, _GF_PRIME) if gf is not None else None
    for h in range(1, _q_gap_limit(ds, w) + 1):
        if qmod is not None:
            qh = pow(qmod, h, _GF_PRIME)
            if qh != 0 and _gf_gcd_degree(list(gf), _gf_scale(gf, qh, _GF_PRIME), _GF_PRIME) < 1:
                continue
        if poly_gcd(w, w.scale_arg(ds.q ** h)).degree > 0:
            hits.append(h)
    return hits


def _strip_x_power(p: Poly) -> tuple[Poly, int]:
    v = p.valuation()
    if v <= 0:
        return p, 0
    return Poly(p.coeffs[v:]), v


def dispersion(ds: DiffStructure, poly: Poly) -> int:
    """Largest L >= 0 such that some root pair of ``poly`` sits L apart in the
    structure's orbit sense; 0 when there is no such pair."""
    if poly.is_zero():
        raise ZeroInputError("dispersion of the zero polynomial")
    if poly.degree < 1:
        return 0
    w = _radical(poly)
    if not ds.is_shift:
        w, _ = _strip_x_power(w)
        if w.degree < 1:
            return 0
        cands = _q_gap_candidates(ds, w)
    else:
        cands = _shift_gap_candidates(w)
    return max(cands, default=0)


def polar_dispersion(ds: DiffStructure, f: RatFun) -> int:
    """Dispersion of the denominator; 0 for polynomials."""
    return dispersion(ds, f.den)


def is_standard(ds: DiffStructure, f: RatFun) -> bool:
    """True iff the combined zero/pole set has dispersion 0."""
    if f.is_zero():
        raise ZeroInputError("standardness of the zero function")
    return dispersion(ds, f.num * f.den) == 0


# ---------------------------------------------------------------------------
# additive standard decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StandardDecomp:
    """Certified decomposition f = standard_part + sigma(g) - a*g with
    polar dispersion of the standard part equal to 0."""

    structure: DiffStructure
    twist_a: Rat
    standard_part: RatFun
    certificate_g: RatFun

    def reconstruct(self) -> RatFun:
        sigma_g = apply_sigma(self.structure, self.certificate_g)
        return self.standard_part + sigma_g - RatFun.const(self.twist_a) * self.certificate_g


@dataclass(frozen=True)
class MultStandardForm:
    """Certified decomposition f = standard_part * sigma(g)/g with a standard
    standard_part."""

    structure: DiffStructure
    standard_part: RatFun
    certificate_g: RatFun

    def reconstruct(self) -> RatFun:
        sigma_g = apply_sigma(self.structure, self.certificate_g)
        return self.standard_part * sigma_g / self.certificate_g


def _orbit_primary_part(q: Poly, w: Poly) -> Poly:
    """The factor of q carrying all roots shared with w, full multiplicity."""
    d1 = Poly.one()
    for factor, mult in squarefree_decomposition(q):
        shared = poly_gcd(factor, w)
        if shared.degree > 0:
            d1 = d1 * shared ** mult
    return d1


def additive_standard_decomp(ds: DiffStructure, f: RatFun, a) -> StandardDecomp:
    """Write f = f_std + sigma(g) - a*g with pdisp(f_std) = 0.

    The polynomial part (shift) or the Laurent-at-0 part (q case) passes
    through untouched.  Each remaining pole block n/u^k is translated onto
    the far end of its orbit using n/u^k = a^L * sigma^{-L}(n/u^k) modulo the
    image of (sigma - a), with the telescoping certificate

        sigma^L(C) - a^L*C = sigma(G) - a*G,
        G = sum_{j=0}^{L-1} a^(L-1-j) * sigma^j(C).
    """
    a = Rat(a)
    if a == 0:
        raise PreconditionError("twist constant a must be nonzero")
    poly_piece, frac = f.poly_part()
    passthrough = RatFun.from_poly(poly_piece)
    if not ds.is_shift and not frac.is_zero():
        stripped, m = _strip_x_power(frac.den)
        if m > 0:
            at_zero, frac = partial_split(frac, Poly.monomial(1, m), stripped)
            passthrough = passthrough + at_zero

    g_total = RatFun.zero()
    while not frac.is_zero():
        gap = dispersion(ds, frac.den)
        if gap == 0:
            break
        shifted = sigma_poly(ds, frac.den, gap).monic()
        w = poly_gcd(_radical(frac.den), _radical(shifted))
        d1 = _orbit_primary_part(frac.den, w)
        block, rest = partial_split(frac, d1, frac.den.exact_div(d1))
        moved = apply_sigma(ds, block, -gap)
        cert = RatFun.zero()
        for j in range(gap):
            cert = cert + RatFun.const(a ** (gap - 1 - j)) * apply_sigma(ds, moved, j)
        frac = rest + RatFun.const(a ** gap) * moved
        g_total = g_total + cert

    result = StandardDecomp(ds, a, passthrough + frac, g_total)
    if result.reconstruct() != f or polar_dispersion(ds, result.standard_part) != 0:
        raise InternalVerificationError("additive standard decomposition failed")
    return result


def multiplicative_standard_form(ds: DiffStructure, f: RatFun) -> MultStandardForm:
    """Write f = f_std * sigma(g)/g with f_std standard.

    Zero/pole orbits of f are merged without root isolation: while the
    combined zero/pole polynomial has dispersion L > 0, each squarefree layer
    v sitting at the low end of a maximal orbit is replaced by sigma^{-L}(v),
    and the telescoping ratio v/sigma^{-L}(v) = sigma(G)/G with
    G = prod_{j=1}^{L} sigma^{-j}(v) is absorbed into the certificate.
    """
    if f.is_zero():
        raise ZeroInputError("multiplicative standard form of zero")
    num, den = f.num, f.den
    cert = RatFun.one()
    while True:
        combined = num * den
        if not ds.is_shift:
            combined, _ = _strip_x_power(combined)
        gap = dispersion(ds, combined)
        if gap == 0:
            break
        rad = _radical(combined)
        w = poly_gcd(rad, sigma_poly(ds, rad, gap).monic())
        for source, exponent in ((num, 1), (den, -1)):
            for factor, mult in squarefree_decomposition(source):
                shared = poly_gcd(factor, w)
                if shared.degree == 0:
                    continue
                moved = sigma_poly(ds, shared, -gap).monic()
                piece = RatFun.from_poly(shared)
                chain = RatFun.one()
                for j in range(1, gap + 1):
                    chain = chain * apply_sigma(ds, piece, -j)
                if exponent == 1:
                    num = num.exact_div(shared ** mult) * moved ** mult
                    cert = cert * chain ** mult
                else:
                    den = den.exact_div(shared ** mult) * moved ** mult
                    cert = cert / chain ** mult
        reduced = RatFun(num, den)
        num, den = reduced.num, reduced.den
    if not cert.num.is_zero() and cert.num.lc() != 1:
        cert = cert * RatFun.const(1 / cert.num.lc())  # sigma(g)/g is scale-invariant
    sigma_cert = apply_sigma(ds, cert)
    standard = f * cert / sigma_cert
    result = MultStandardForm(ds, standard, cert)
    if result.reconstruct() != f or not is_standard(ds, standard):
        raise InternalVerificationError("multiplicative standard form failed")
    return result
