"""Rational-solution engines for linear difference equations.

``solve_scalar`` finds the complete affine space of rational solutions of

    p_0(x)*y + p_1(x)*sigma(y) + ... + p_m(x)*sigma^m(y)
        = sum_k lambda_k * r_k(x)

over Q(x) x Q^t, where each lambda_k is either a fixed rational or a free
constant.  The pipeline is: clear denominators, normalise the operator
support, bound every solution's denominator by an Abramov-style universal
denominator (orbit chains between trailing and leading coefficient roots),
bound the numerator degree by the indicial analysis of the operator at
infinity (plus the analogous valuation analysis at 0 in the q case), then
solve one exact linear system for the numerator coefficients and the free
lambdas.  Negative answers are certified: either the linear system is
inconsistent inside certified bounds (NoSolution, with a witness) or the
certified bound exceeded the configured cap (BoundExceeded; never a wrong
NoSolution).

First-order equations with a constant twist take a fast path through the
additive standard decomposition, and first-order systems are uncoupled by
eliminating coordinates in ascending index order.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum

from .dispersion import (
    _GF_PRIME,
    _gf_coeffs,
    _gf_q_mod,
    _q_gap_candidates,
    _radical,
    _shift_gap_candidates,
    _strip_x_power,
    additive_standard_decomp,
)
from .errors import (
    InternalVerificationError,
    PreconditionError,
    SingularMatrixError,
    ZeroInputError,
)
from .linalg import invert_matrix, solve_affine
from .numcore import (
    RAT_ONE,
    RAT_ZERO,
    Poly,
    Rat,
    RatFun,
    format_poly,
    integer_roots,
    poly_gcd,
    poly_lcm,
    root_magnitude_bound,
)
from .structures import DiffStructure, apply_sigma, sigma_poly

DEFAULT_DEGREE_CAP = 200


def configured_degree_cap() -> int:
    raw = os.environ.get("DIFFALG_DEGREE_CAP", "")
    if raw.strip():
        try:
            return max(0, int(raw))
        except ValueError:
            pass
    return DEFAULT_DEGREE_CAP


class Status(Enum):
    SOLVED = "Solved"
    NO_SOLUTION = "NoSolution"
    BOUND_EXCEEDED = "BoundExceeded"


@dataclass(frozen=True)
class ScalarDiffEq:
    """sum_i coeffs[i] * sigma^i(y) = sum_k lambda_k * rhs_basis[k].

    ``lambda_fixed`` pins individual lambdas to rational values; a None entry
    leaves that lambda as a free constant unknown.  When omitted entirely all
    lambdas are free.
    """

    structure: DiffStructure
    coeffs: tuple[Poly, ...]
    rhs_basis: tuple[RatFun, ...] = ()
    lambda_fixed: tuple[Rat | None, ...] | None = None

    def __post_init__(self):
        coeffs = tuple(c if isinstance(c, Poly) else Poly.const(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        basis = tuple(r if isinstance(r, RatFun) else RatFun._coerce(r) for r in self.rhs_basis)
        object.__setattr__(self, "rhs_basis", basis)
        if self.lambda_fixed is not None:
            lf = tuple(None if v is None else Rat(v) for v in self.lambda_fixed)
            if len(lf) != len(basis):
                raise PreconditionError("lambda_fixed length must match rhs_basis")
            object.__setattr__(self, "lambda_fixed", lf)
        if not coeffs or all(c.is_zero() for c in coeffs):
            raise PreconditionError("equation needs a nonzero operator")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def fixed_mask(self) -> tuple[Rat | None, ...]:
        if self.lambda_fixed is None:
            return (None,) * len(self.rhs_basis)
        return self.lambda_fixed

    def rhs_value(self, lambdas: tuple[Rat, ...]) -> RatFun:
        acc = RatFun.zero()
        for lam, r in zip(lambdas, self.rhs_basis):
            if lam != 0:
                acc = acc + RatFun.const(lam) * r
        return acc

    def apply_operator(self, g: RatFun) -> RatFun:
        acc = RatFun.zero()
        for i, p in enumerate(self.coeffs):
            if not p.is_zero():
                acc = acc + RatFun.from_poly(p) * apply_sigma(self.structure, g, i)
        return acc

    def residual(self, g: RatFun, lambdas: tuple[Rat, ...]) -> RatFun:
        return self.apply_operator(g) - self.rhs_value(lambdas)


def scalar_eq_from_ratfun_coeffs(
    ds: DiffStructure,
    coeffs,
    rhs_basis=(),
    lambda_fixed=None,
) -> ScalarDiffEq:
    """Build a ScalarDiffEq from rational-function coefficients by clearing
    their common denominator (the rhs basis is scaled by the same factor, so
    the lambda semantics are unchanged)."""
    coeffs = [RatFun._coerce(c) for c in coeffs]
    basis = [RatFun._coerce(r) for r in rhs_basis]
    den = Poly.one()
    for c in coeffs:
        den = poly_lcm(den, c.den)
    den_rf = RatFun.from_poly(den)
    poly_coeffs = []
    for c in coeffs:
        cleared = c * den_rf
        if not cleared.is_polynomial():
            raise InternalVerificationError("denominator clearing failed")
        poly_coeffs.append(cleared.num * (1 / cleared.den.lc()))
    return ScalarDiffEq(ds, tuple(poly_coeffs), tuple(r * den_rf for r in basis), lambda_fixed)


@dataclass(frozen=True)
class SolutionSpace:
    """Affine space of rational solutions (g, lambda).

    Every stored pair satisfies its equation under exact substitution;
    NoSolution carries a human-readable obstruction witness.
    """

    status: Status
    particular: tuple[RatFun, tuple[Rat, ...]] | None = None
    homogeneous_basis: tuple[tuple[RatFun, tuple[Rat, ...]], ...] = ()
    witness: str | None = None
    universal_den: Poly | None = None
    degree_bound: int | None = None

    def homogeneous_dimension(self) -> int:
        return len(self.homogeneous_basis)

    def is_solved(self) -> bool:
        return self.status is Status.SOLVED


@dataclass(frozen=True)
class VectorSolutionSpace:
    """Solution space of a first-order system sigma(v) = M v + c, with the
    per-coordinate eliminated scalar equations retained for audit."""

    status: Status
    particular: tuple[RatFun, ...] | None = None
    homogeneous_basis: tuple[tuple[RatFun, ...], ...] = ()
    witness: str | None = None
    scalar_traces: tuple[ScalarDiffEq, ...] = ()
    obstructed_coordinate: int | None = None

    def is_solved(self) -> bool:
        return self.status is Status.SOLVED


class MatrixRF:
    """Square matrix over Q(x); invertibility is checked on demand."""

    __slots__ = ("n", "entries")

    def __init__(self, entries):
        rows = tuple(tuple(RatFun._coerce(v) for v in row) for row in entries)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise PreconditionError("MatrixRF must be square and nonempty")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, name, value):
        raise AttributeError("MatrixRF is immutable")

    def __eq__(self, other):
        if isinstance(other, MatrixRF):
            return self.entries == other.entries
        return NotImplemented

    def __hash__(self):
        return hash(self.entries)

    @staticmethod
    def identity(n: int) -> "MatrixRF":
        return MatrixRF(
            [[RatFun.one() if i == j else RatFun.zero() for j in range(n)] for i in range(n)]
        )

    def __matmul__(self, other: "MatrixRF") -> "MatrixRF":
        n = self.n
        return MatrixRF(
            [
                [
                    sum((self.entries[i][k] * other.entries[k][j] for k in range(n)), RatFun.zero())
                    for j in range(n)
                ]
                for i in range(n)
            ]
        )

    def mat_vec(self, vec) -> list[RatFun]:
        return [
            sum((self.entries[i][k] * vec[k] for k in range(self.n)), RatFun.zero())
            for i in range(self.n)
        ]

    def map(self, fn) -> "MatrixRF":
        return MatrixRF([[fn(v) for v in row] for row in self.entries])

    def inverse(self) -> "MatrixRF":
        inv = invert_matrix([list(r) for r in self.entries], RatFun.zero(), RatFun.one())
        if inv is None:
            raise SingularMatrixError("matrix is singular over Q(x)")
        return MatrixRF(inv)

    def is_invertible(self) -> bool:
        return invert_matrix([list(r) for r in self.entries], RatFun.zero(), RatFun.one()) is not None

    def __repr__(self):
        return f"MatrixRF({self.entries!r})"


# ---------------------------------------------------------------------------
# normalisation
# ---------------------------------------------------------------------------


@dataclass
class _Prepared:
    ds: DiffStructure
    coeffs: list[Poly]          # polynomial, trailing/leading nonzero
    rhs_fixed: Poly             # fixed part, denominator cleared
    rhs_free: list[Poly]        # free basis, denominator cleared
    free_slots: list[int]       # index into the original rhs_basis
    fixed_values: list[Rat]     # per original slot; 0 where free


def _prepare(eq: ScalarDiffEq) -> _Prepared:
    ds = eq.structure
    mask = eq.fixed_mask()
    fixed_rf = RatFun.zero()
    free_slots = []
    free_rf = []
    fixed_values: list[Rat] = []
    for k, r in enumerate(eq.rhs_basis):
        if mask[k] is None:
            free_slots.append(k)
            free_rf.append(r)
            fixed_values.append(RAT_ZERO)
        else:
            fixed_rf = fixed_rf + RatFun.const(mask[k]) * r
            fixed_values.append(mask[k])

    den = fixed_rf.den
    for r in free_rf:
        den = poly_lcm(den, r.den)
    den_rf = RatFun.from_poly(den)
    coeffs = [p * den for p in eq.coeffs]

    def cleared_poly(r: RatFun) -> Poly:
        cleared = r * den_rf
        if not cleared.is_polynomial():
            raise InternalVerificationError("rhs denominator clearing failed")
        return cleared.num * (1 / cleared.den.lc())

    rhs_fixed = cleared_poly(fixed_rf) if not fixed_rf.is_zero() else Poly.zero()
    rhs_free = [cleared_poly(r) for r in free_rf]

    # normalise operator support: drop leading/trailing zero coefficients by
    # applying sigma^(-low) to the whole equation
    low = 0
    while coeffs[low].is_zero():
        low += 1
    high = len(coeffs) - 1
    while coeffs[high].is_zero():
        high -= 1
    coeffs = coeffs[low : high + 1]
    if low > 0:
        coeffs = [_shift_poly_back(ds, p, low) for p in coeffs]
        rhs_fixed = _shift_poly_back(ds, rhs_fixed, low)
        rhs_free = [_shift_poly_back(ds, p, low) for p in rhs_free]
    return _Prepared(ds, coeffs, rhs_fixed, rhs_free, free_slots, fixed_values)


def _shift_poly_back(ds: DiffStructure, p: Poly, amount: int) -> Poly:
    """sigma^(-amount) of a polynomial; stays a polynomial in both structures
    (q-dilation only rescales coefficients)."""
    if p.is_zero():
        return p
    return sigma_poly(ds, p, -amount)


# ---------------------------------------------------------------------------
# universal denominator
# ---------------------------------------------------------------------------


def universal_denominator(eq: ScalarDiffEq) -> Poly:
    """A polynomial u such that den(g) | u for every rational solution g.

    Built from orbit chains between the roots of the (denominator-cleared)
    trailing coefficient and of the shifted leading coefficient, extracted
    for the largest candidate gaps first; both orientations of each root
    pairing contribute a chain, which can only enlarge u.  In the q case the
    chains run over the prime-to-x parts and the power of x is bounded by
    the valuation analysis of the equation at 0.
    """
    prep = _prepare(eq)
    return _universal_denominator_prepared(prep)


def _universal_denominator_prepared(prep: _Prepared) -> Poly:
    ds = prep.ds
    coeffs = prep.coeffs
    m = len(coeffs) - 1
    if m == 0:
        u = coeffs[0].monic()
        if not ds.is_shift:
            u, _ = _strip_x_power(u)
            u = u * Poly.monomial(1, max(0, -_q_valuation_floor(prep)))
        return u

    trailing = coeffs[0]
    leading = sigma_poly(ds, coeffs[m], -m)
    if ds.is_shift:
        a_side, b_side = trailing.monic(), leading.monic()
    else:
        a_side, _ = _strip_x_power(trailing.monic())
        b_side, _ = _strip_x_power(leading.monic())
        a_side = a_side.monic()
        b_side = b_side.monic()

    combined = _radical(a_side * b_side)
    if ds.is_shift:
        gaps = _shift_gap_candidates(combined)
    else:
        stripped, _ = _strip_x_power(combined)
        gaps = _q_gap_candidates(ds, stripped) if stripped.degree > 0 else []

    u = Poly.one()
    reversed_chains = Poly.one()
    for h in sorted(set([0] + gaps), reverse=True):
        shifted_a = sigma_poly(ds, a_side, h).monic()
        g1 = poly_gcd(shifted_a, b_side)
        if g1.degree > 0:
            a_side = a_side.exact_div(sigma_poly(ds, g1, -h).monic())
            b_side = b_side.exact_div(g1)
            u = u * _orbit_chain(ds, g1, h)
        if h > 0:
            shifted_b = sigma_poly(ds, b_side, h).monic()
            g2 = poly_gcd(shifted_b, a_side)
            if g2.degree > 0:
                # reversed orientation: not part of the sharp pole-span
                # analysis, so nothing is stripped and a squarefree chain
                # merged by lcm is enough
                chain = _orbit_chain(ds, _radical(g2), h)
                reversed_chains = poly_lcm(reversed_chains, chain)
    u = poly_lcm(u, reversed_chains).monic()
    if not ds.is_shift:
        u = u * Poly.monomial(1, max(0, -_q_valuation_floor(prep)))
    return u


def _orbit_chain(ds: DiffStructure, g: Poly, h: int) -> Poly:
    chain = Poly.one()
    for j in range(h + 1):
        chain = chain * sigma_poly(ds, g, -j).monic()
    return chain


def _q_power_log(ds: DiffStructure, value: Rat) -> int | None:
    """The integer v with q^v == value, if one exists."""
    if value == 0:
        return None
    q = ds.q
    if value == 1:
        return 0
    num = abs(int(value.numerator))
    den = abs(int(value.denominator))
    qn = abs(int(q.numerator))
    qd = abs(int(q.denominator))
    logq = abs(math.log(qn) - math.log(qd))
    mag = abs(math.log(num) - math.log(den))
    vmax = int(mag / logq) + 2
    for v in range(-vmax, vmax + 1):
        if q ** v == value:
            return v
    return None


def _q_power_roots(ds: DiffStructure, p: Poly) -> list[int]:
    """All integers v with p(q^v) = 0, found by scanning the magnitude window
    allowed by the root bounds (no factoring); evaluation mod a large prime
    certifies the nonroots cheaply."""
    if p.is_zero():
        raise ZeroInputError("q-power roots of the zero polynomial")
    w, _ = _strip_x_power(p)
    if w.degree < 1:
        return []
    hi = root_magnitude_bound(w)
    rev = Poly(list(reversed(w.coeffs)))
    lo = 1 / root_magnitude_bound(rev)
    q = ds.q
    logq = abs(math.log(abs(int(q.numerator))) - math.log(abs(int(q.denominator))))
    log_hi = math.log(int(hi.numerator)) - math.log(int(hi.denominator))
    log_lo = math.log(int(lo.numerator)) - math.log(int(lo.denominator))
    vbound = int((max(abs(log_hi), abs(log_lo)) / logq)) + 2
    gf = _gf_coeffs(w, _GF_PRIME)
    qmod = _gf_q_mod(ds, _GF_PRIME) if gf is not None else None
    out = []
    for v in range(-vbound, vbound + 1):
        if qmod is not None:
            qv = pow(qmod, v, _GF_PRIME) if v >= 0 else pow(pow(qmod, _GF_PRIME - 2, _GF_PRIME), -v, _GF_PRIME)
            acc = 0
            for c in reversed(gf):
                acc = (acc * qv + c) % _GF_PRIME
            if acc != 0:
                continue
        if w.eval(q ** v) == 0:
            out.append(v)
    return out


def _q_valuation_floor(prep: _Prepared) -> int:
    """Lower bound on the valuation at 0 of any rational solution (q case)."""
    vals = [p.valuation() for p in prep.coeffs if not p.is_zero()]
    vmin_coeff = min(vals)
    psi = Poly([p[vmin_coeff] for p in prep.coeffs])
    cands = _q_power_roots(prep.ds, psi) if not psi.is_zero() else []
    for r in [prep.rhs_fixed] + prep.rhs_free:
        if not r.is_zero():
            cands.append(r.valuation() - vmin_coeff)
    return min(cands, default=0)


# ---------------------------------------------------------------------------
# degree bound at infinity
# ---------------------------------------------------------------------------


def _falling_factorial_over_fact(t: int) -> Poly:
    """binomial(d, t) as a polynomial in d."""
    out = Poly.one()
    for u in range(t):
        out = out * Poly([Rat(-u), RAT_ONE])
    return out * Rat(1, math.factorial(t))


def _degree_bound(ds: DiffStructure, coeffs: list[Poly], rhs_list: list[Poly]) -> int | None:
    """Certified bound on deg(z) for polynomial solutions z of
    sum_i coeffs[i]*sigma^i(z) = rhs; None if the analysis degenerates."""
    m = len(coeffs) - 1
    big_d = max(p.degree for p in coeffs)
    rhs_deg = max((r.degree for r in rhs_list if not r.is_zero()), default=None)
    if ds.is_shift:
        # coefficient of x^(D+d-s) in sum_i Q_i*(x+i)^d is
        # c_s(d) = sum_t binom(d,t) * [x^(D-(s-t))] A_t,  A_t = sum_i i^t Q_i
        max_s = big_d + m + 1
        a_t = []
        for t in range(max_s + 1):
            acc = Poly.zero()
            for i, p in enumerate(coeffs):
                w = Rat(i) ** t if t > 0 else RAT_ONE
                if i == 0 and t > 0:
                    continue
                acc = acc + p * w
            a_t.append(acc)
        binoms = [_falling_factorial_over_fact(t) for t in range(max_s + 1)]
        for s in range(max_s + 1):
            c_s = Poly.zero()
            for t in range(s + 1):
                beta = a_t[t][big_d - (s - t)] if big_d - (s - t) >= 0 else RAT_ZERO
                if beta != 0:
                    c_s = c_s + binoms[t] * beta
            if not c_s.is_zero():
                cands = [r for r in integer_roots(c_s)]
                if rhs_deg is not None:
                    cands.append(rhs_deg - big_d + s)
                return max(cands, default=-1)
        return None
    # q case: coefficient of x^(d+D) is z_d * phi_D(q^d)
    phi = Poly([p[big_d] for p in coeffs])
    cands = _q_power_roots(ds, phi)
    if rhs_deg is not None:
        cands.append(rhs_deg - big_d)
    return max(cands, default=-1)


# ---------------------------------------------------------------------------
# the scalar solver
# ---------------------------------------------------------------------------


def solve_scalar(eq: ScalarDiffEq, degree_cap: int | None = None) -> SolutionSpace:
    """Complete affine solution space of the equation over Q(x) x Q^t."""
    cap = configured_degree_cap() if degree_cap is None else degree_cap
    prep = _prepare(eq)
    ds = prep.ds
    m = len(prep.coeffs) - 1

    if m == 0:
        return _solve_degenerate_division(eq, prep)

    u = _universal_denominator_prepared(prep)
    # y = z/u: sigma^i(y) = sigma^i(z)/sigma^i(u); the exact (non-monic in the
    # q case) shifted denominators matter here
    shifted_u = [sigma_poly(ds, u, i) for i in range(m + 1)]
    big_u = Poly.one()
    for p in shifted_u:
        big_u = poly_lcm(big_u, p.monic())
    q_coeffs = [prep.coeffs[i] * big_u.exact_div(shifted_u[i]) for i in range(m + 1)]
    rhs_fixed = prep.rhs_fixed * big_u
    rhs_free = [r * big_u for r in prep.rhs_free]

    bound = _degree_bound(ds, q_coeffs, [rhs_fixed] + rhs_free)
    if bound is None or bound > cap:
        searched = cap if bound is None else bound
        return SolutionSpace(
            Status.BOUND_EXCEEDED,
            witness=f"certified degree bound {bound} exceeds cap {cap}"
            if bound is not None
            else f"degree analysis degenerated; cap {searched} reached",
            universal_den=u,
            degree_bound=bound,
        )

    return _solve_with_ansatz(eq, prep, u, q_coeffs, rhs_fixed, rhs_free, bound)


def _solve_degenerate_division(eq: ScalarDiffEq, prep: _Prepared) -> SolutionSpace:
    p0 = prep.coeffs[0]
    p0_rf = RatFun.from_poly(p0)
    particular_g = RatFun.from_poly(prep.rhs_fixed) / p0_rf
    basis = []
    lam_template = list(prep.fixed_values)
    for slot, r in zip(prep.free_slots, prep.rhs_free):
        lam = [RAT_ZERO] * len(eq.rhs_basis)
        lam[slot] = RAT_ONE
        basis.append((RatFun.from_poly(r) / p0_rf, tuple(lam)))
    space = SolutionSpace(
        Status.SOLVED,
        particular=(particular_g, tuple(lam_template)),
        homogeneous_basis=tuple(basis),
        universal_den=p0.monic(),
        degree_bound=None,
    )
    _verify_space(eq, space)
    return space


def _sigma_basis_columns(ds: DiffStructure, q_coeffs: list[Poly], bound: int) -> list[Poly]:
    """Column polynomial for each z_j: sum_i Q_i * sigma^i(x^j), j = 0..bound."""
    m = len(q_coeffs) - 1
    cols = [Poly.zero() for _ in range(bound + 1)]
    if ds.is_shift:
        for i in range(m + 1):
            if q_coeffs[i].is_zero():
                continue
            pw = Poly.one()
            lin = Poly([Rat(i), RAT_ONE])
            for j in range(bound + 1):
                cols[j] = cols[j] + q_coeffs[i] * pw
                if j < bound:
                    pw = pw * lin
    else:
        q = ds.q
        qi = [q ** i for i in range(m + 1)]
        mult = [RAT_ONE] * (m + 1)
        for j in range(bound + 1):
            s = Poly.zero()
            for i in range(m + 1):
                if not q_coeffs[i].is_zero() and mult[i] != 0:
                    s = s + q_coeffs[i] * mult[i]
            cols[j] = Poly([RAT_ZERO] * j + list(s.coeffs))
            for i in range(m + 1):
                mult[i] = mult[i] * qi[i]
    return cols


def _solve_with_ansatz(eq, prep, u, q_coeffs, rhs_fixed, rhs_free, bound) -> SolutionSpace:
    ds = prep.ds
    n_lam = len(rhs_free)
    n_z = bound + 1
    cols = _sigma_basis_columns(ds, q_coeffs, bound) if bound >= 0 else []
    max_deg = max(
        [c.degree for c in cols if not c.is_zero()]
        + [rhs_fixed.degree]
        + [r.degree for r in rhs_free if not r.is_zero()]
        + [0]
    )
    nrows = max_deg + 1
    rows = []
    for e in range(nrows):
        row = [(-r[e]) for r in rhs_free]
        row.extend(c[e] for c in cols)
        rows.append(row)
    rhs_vec = [rhs_fixed[e] for e in range(nrows)]
    particular, nullsp = solve_affine(rows, rhs_vec, RAT_ZERO, RAT_ONE)

    def unpack(vec) -> tuple[RatFun, tuple[Rat, ...]]:
        lam_free = vec[:n_lam]
        z = Poly(vec[n_lam : n_lam + n_z])
        lam_full = list(prep.fixed_values)
        for slot, value in zip(prep.free_slots, lam_free):
            lam_full[slot] = value
        return RatFun(z, u.monic()) if not z.is_zero() else RatFun.zero(), tuple(lam_full)

    def unpack_homog(vec) -> tuple[RatFun, tuple[Rat, ...]]:
        lam_free = vec[:n_lam]
        z = Poly(vec[n_lam : n_lam + n_z])
        lam_full = [RAT_ZERO] * len(eq.rhs_basis)
        for slot, value in zip(prep.free_slots, lam_free):
            lam_full[slot] = value
        return RatFun(z, u.monic()) if not z.is_zero() else RatFun.zero(), tuple(lam_full)

    basis = tuple(unpack_homog(v) for v in nullsp)
    basis = tuple(pair for pair in basis if not (pair[0].is_zero() and all(v == 0 for v in pair[1])))
    for g, lam in basis:
        if not eq.residual(g, lam).is_zero():
            raise InternalVerificationError("homogeneous basis vector failed substitution")
    if particular is None:
        u_text = format_poly(u) if u.degree <= 8 else f"a degree-{u.degree} polynomial"
        witness = (
            "no rational solution: with denominator bound "
            f"u = {u_text} and numerator degree bound {bound}, "
            "the coefficient system is inconsistent"
        )
        return SolutionSpace(
            Status.NO_SOLUTION,
            homogeneous_basis=basis,
            witness=witness,
            universal_den=u,
            degree_bound=bound,
        )
    space = SolutionSpace(
        Status.SOLVED,
        particular=unpack(particular),
        homogeneous_basis=basis,
        universal_den=u,
        degree_bound=bound,
    )
    _verify_space(eq, space)
    return space


def _verify_space(eq: ScalarDiffEq, space: SolutionSpace):
    if space.particular is not None:
        g, lam = space.particular
        if not eq.residual(g, lam).is_zero():
            raise InternalVerificationError("particular solution failed substitution")
    for g, lam in space.homogeneous_basis:
        if not eq.residual(g, lam).is_zero():
            raise InternalVerificationError("homogeneous basis vector failed substitution")


# ---------------------------------------------------------------------------
# first-order convenience with constant-twist fast path
# ---------------------------------------------------------------------------


def solve_first_order(
    ds: DiffStructure,
    a: RatFun,
    rhs_basis=(),
    lambda_fixed=None,
    degree_cap: int | None = None,
) -> SolutionSpace:
    """Solutions of sigma(g) - a*g = sum_k lambda_k * rhs_basis[k], a != 0."""
    a = RatFun._coerce(a)
    if a.is_zero():
        raise PreconditionError("twist a must be nonzero")
    eq = scalar_eq_from_ratfun_coeffs(
        ds, [-a, RatFun.one()], rhs_basis=rhs_basis, lambda_fixed=lambda_fixed
    )
    if a.is_constant():
        mask = eq.fixed_mask()
        laurent_ok = all(
            _is_laurent(ds, r) for r, fixed in zip(eq.rhs_basis, mask) if fixed is None
        )
        if laurent_ok:
            return _solve_first_order_const(eq, a.const_value())
    return solve_scalar(eq, degree_cap=degree_cap)


def _is_laurent(ds: DiffStructure, r: RatFun) -> bool:
    if ds.is_shift:
        return r.is_polynomial()
    stripped, _ = _strip_x_power(r.den)
    return stripped.degree == 0


def _solve_first_order_const(eq: ScalarDiffEq, a: Rat) -> SolutionSpace:
    """sigma(g) - a*g = rhs with constant a, via the additive standard
    decomposition: the fixed rhs is rewritten as standard + (sigma - a)(w);
    a standard part with a pole (a nonzero pole in the q case) is a certified
    obstruction, and what remains is a small Laurent-coefficient system.

    Requires every free rhs basis element to be polynomial (shift) or Laurent
    at 0 (q case); the caller guarantees this.
    """
    ds = eq.structure
    mask = eq.fixed_mask()
    fixed_rf = RatFun.zero()
    free_slots = []
    free_basis: list[RatFun] = []
    fixed_values: list[Rat] = []
    for k, r in enumerate(eq.rhs_basis):
        if mask[k] is None:
            free_slots.append(k)
            free_basis.append(r)
            fixed_values.append(RAT_ZERO)
        else:
            fixed_rf = fixed_rf + RatFun.const(mask[k]) * r
            fixed_values.append(mask[k])

    decomp = additive_standard_decomp(ds, fixed_rf, a)
    s_part = decomp.standard_part
    _, frac = s_part.poly_part()
    blocked = not frac.is_zero() and not _is_laurent(ds, frac)
    pole_witness = None
    if blocked:
        pole_witness = (
            "pole-orbit obstruction: the standard part of the right-hand side "
            f"keeps a pole block with denominator {format_poly(frac.den)} "
            "(polar dispersion 0), which sigma(g) - a*g cannot produce"
        )
        s_part = RatFun.zero()  # solve on for the homogeneous kernel only

    # remaining problem: sigma(h) - a*h = laurent(s_part) + sum lambda_k r_k
    lo, hi = _laurent_span(ds, [s_part] + free_basis)
    r_pow = _q_power_log(ds, a) if not ds.is_shift else None
    if r_pow is not None:
        lo = min(lo, r_pow)
        hi = max(hi, r_pow)
    if ds.is_shift:
        lo = 0
        hi = hi + 1  # a = 1 raises the degree by one
    n_lam = len(free_basis)
    n_h = hi - lo + 1
    s_coeffs = _laurent_coeffs(ds, s_part, lo, hi)
    free_coeffs = [_laurent_coeffs(ds, r, lo, hi) for r in free_basis]
    q = ds.q if not ds.is_shift else None
    rows = []
    for idx, j in enumerate(range(lo, hi + 1)):
        row = [(-fc[idx]) for fc in free_coeffs]
        if ds.is_shift:
            # coefficient of x^j in (x+1)^t - a*x^t, column t
            for t in range(lo, hi + 1):
                v = Rat(math.comb(t, j)) if 0 <= j <= t else RAT_ZERO
                if t == j:
                    v = v - a
                row.append(v)
        else:
            row.extend((q ** j - a) if t == j else RAT_ZERO for t in range(lo, hi + 1))
        rows.append(row)
    particular, nullsp = solve_affine(rows, s_coeffs, RAT_ZERO, RAT_ONE)

    def to_ratfun(hcoeffs) -> RatFun:
        if lo >= 0:
            return RatFun.from_poly(Poly([RAT_ZERO] * lo + list(hcoeffs)))
        return RatFun(Poly(list(hcoeffs)), Poly.monomial(1, -lo))

    def unpack(vec, homogeneous: bool):
        lam_free = vec[:n_lam]
        h = to_ratfun(vec[n_lam:])
        g = h if homogeneous else h + decomp.certificate_g
        lam_full = [RAT_ZERO] * len(eq.rhs_basis) if homogeneous else list(fixed_values)
        for slot, value in zip(free_slots, lam_free):
            lam_full[slot] = value
        return g, tuple(lam_full)

    basis = tuple(unpack(v, True) for v in nullsp)
    basis = tuple(p for p in basis if not (p[0].is_zero() and all(v == 0 for v in p[1])))
    for g, lam in basis:
        if not eq.residual(g, lam).is_zero():
            raise InternalVerificationError("fast-path homogeneous vector failed substitution")
    if pole_witness is not None:
        return SolutionSpace(Status.NO_SOLUTION, homogeneous_basis=basis, witness=pole_witness)
    if particular is None:
        witness = (
            "Laurent obstruction: the x-power coefficients of the standard part "
            "cannot be matched by sigma(g) - a*g with the available free constants"
        )
        return SolutionSpace(Status.NO_SOLUTION, homogeneous_basis=basis, witness=witness)
    space = SolutionSpace(
        Status.SOLVED,
        particular=unpack(particular, False),
        homogeneous_basis=basis,
    )
    _verify_space(eq, space)
    return space


def _laurent_span(ds: DiffStructure, funcs) -> tuple[int, int]:
    lo, hi = 0, 0
    for f in funcs:
        if f.is_zero():
            continue
        num, den = f.num, f.den
        if ds.is_shift:
            hi = max(hi, num.degree - den.degree)
        else:
            _, xm = _strip_x_power(den)
            lo = min(lo, num.valuation() - xm)
            hi = max(hi, num.degree - xm)
    return lo, hi


def _laurent_coeffs(ds: DiffStructure, f: RatFun, lo: int, hi: int) -> list[Rat]:
    """Coefficients of x^lo .. x^hi of a Laurent rational function
    (denominator a power of x; shift case requires a polynomial)."""
    if f.is_zero():
        return [RAT_ZERO] * (hi - lo + 1)
    stripped, xm = _strip_x_power(f.den)
    if stripped.degree != 0:
        raise PreconditionError("not a Laurent function")
    scale = 1 / stripped.lc()
    out = []
    for j in range(lo, hi + 1):
        out.append(f.num[j + xm] * scale)
    return out


# ---------------------------------------------------------------------------
# first-order systems
# ---------------------------------------------------------------------------


def _system_iterates(ds: DiffStructure, m: MatrixRF, c: list[RatFun], count: int):
    """(M_k, c_k) with sigma^k(v) = M_k v + c_k for k = 0..count."""
    n = m.n
    mats = [MatrixRF.identity(n)]
    vecs: list[list[RatFun]] = [[RatFun.zero()] * n]
    for _ in range(count):
        mk = mats[-1].map(lambda f: apply_sigma(ds, f, 1))
        ck = [apply_sigma(ds, f, 1) for f in vecs[-1]]
        mats.append(mk @ m)
        vecs.append([a + b for a, b in zip(mk.mat_vec(c), ck)])
    return mats, vecs


def eliminate_coordinate(
    ds: DiffStructure, m: MatrixRF, c, coord: int
) -> ScalarDiffEq:
    """The minimal-order scalar equation satisfied by coordinate ``coord`` of
    every solution of sigma(v) = M v + c."""
    c = [RatFun._coerce(v) for v in c]
    n = m.n
    mats, vecs = _system_iterates(ds, m, c, n)
    rows_so_far: list[list[RatFun]] = [list(mats[0].entries[coord])]
    for k in range(1, n + 1):
        target = [-v for v in mats[k].entries[coord]]
        cols = list(zip(*rows_so_far))  # n x k matrix (columns = previous rows)
        sol, _ = solve_affine([list(col) for col in cols], target, RatFun.zero(), RatFun.one())
        if sol is not None:
            e = list(sol) + [RatFun.one()]
            rhs = sum((e[i] * vecs[i][coord] for i in range(k + 1)), RatFun.zero())
            return scalar_eq_from_ratfun_coeffs(
                ds, e, rhs_basis=[rhs] if not rhs.is_zero() else [],
                lambda_fixed=[RAT_ONE] if not rhs.is_zero() else None,
            )
        rows_so_far.append(list(mats[k].entries[coord]))
    raise InternalVerificationError("coordinate elimination found no relation")


def solve_system(ds: DiffStructure, m: MatrixRF, c, degree_cap: int | None = None) -> VectorSolutionSpace:
    """All rational vector solutions of sigma(v) = M v + c.

    Coordinates are eliminated in ascending index order to scalar equations;
    each scalar solution space is parameterised and the parameters are then
    cut down by substituting back into the full system.  Recovered vectors
    are verified by substitution.
    """
    c = [RatFun._coerce(v) for v in c]
    n = m.n
    if len(c) != n:
        raise PreconditionError("inhomogeneous term has wrong dimension")
    if not m.is_invertible():
        raise SingularMatrixError("system matrix must be invertible over Q(x)")

    traces: list[ScalarDiffEq] = []
    per_coord: list[tuple[RatFun, list[RatFun]]] = []  # (particular, basis funcs)
    for j in range(n):
        eq_j = eliminate_coordinate(ds, m, c, j)
        traces.append(eq_j)
        sol = solve_scalar(eq_j, degree_cap=degree_cap)
        if sol.status is Status.BOUND_EXCEEDED:
            return VectorSolutionSpace(
                Status.BOUND_EXCEEDED,
                witness=f"coordinate {j}: {sol.witness}",
                scalar_traces=tuple(traces),
                obstructed_coordinate=j,
            )
        if sol.status is Status.NO_SOLUTION:
            return VectorSolutionSpace(
                Status.NO_SOLUTION,
                witness=f"coordinate {j} has no rational solution: {sol.witness}",
                scalar_traces=tuple(traces),
                obstructed_coordinate=j,
            )
        part = sol.particular[0] if sol.particular is not None else RatFun.zero()
        per_coord.append((part, [g for g, _ in sol.homogeneous_basis]))

    # affine parameterisation v_j = p_j + sum_t mu_{j,t} b_{j,t}
    mu_index: list[tuple[int, int]] = []
    for j in range(n):
        for t in range(len(per_coord[j][1])):
            mu_index.append((j, t))

    def coord_affine(j: int) -> tuple[RatFun, dict[int, RatFun]]:
        base = per_coord[j][0]
        lin = {}
        for mu_i, (jj, t) in enumerate(mu_index):
            if jj == j:
                lin[mu_i] = per_coord[j][1][t]
        return base, lin

    # residual rows: sigma(v_i) - sum_j M_ij v_j - c_i == 0
    rows: list[list[Rat]] = []
    rhs_vec: list[Rat] = []
    for i in range(n):
        base_i, lin_i = coord_affine(i)
        res_base = apply_sigma(ds, base_i, 1) - c[i]
        res_lin: dict[int, RatFun] = {k: apply_sigma(ds, v, 1) for k, v in lin_i.items()}
        for j in range(n):
            base_j, lin_j = coord_affine(j)
            mij = m.entries[i][j]
            if mij.is_zero():
                continue
            res_base = res_base - mij * base_j
            for k, v in lin_j.items():
                res_lin[k] = res_lin.get(k, RatFun.zero()) - mij * v
        # clear to a common denominator and emit coefficient rows
        den = res_base.den
        for v in res_lin.values():
            den = poly_lcm(den, v.den)
        den_rf = RatFun.from_poly(den)
        base_poly = (res_base * den_rf).num
        lin_polys = {k: (v * den_rf).num for k, v in res_lin.items()}
        max_e = max(
            [base_poly.degree] + [p.degree for p in lin_polys.values()] + [0]
        )
        for e in range(max_e + 1):
            row = [RAT_ZERO] * len(mu_index)
            for k, p in lin_polys.items():
                row[k] = p[e]
            rows.append(row)
            rhs_vec.append(-base_poly[e])

    particular_mu, null_mu = solve_affine(rows, rhs_vec, RAT_ZERO, RAT_ONE)
    if particular_mu is None:
        return VectorSolutionSpace(
            Status.NO_SOLUTION,
            witness="per-coordinate solutions exist but no joint assignment "
            "satisfies the full system",
            scalar_traces=tuple(traces),
        )

    def assemble(mu, include_base: bool) -> tuple[RatFun, ...]:
        out = []
        for j in range(n):
            base, lin = coord_affine(j)
            v = base if include_base else RatFun.zero()
            for k, fn in lin.items():
                if mu[k] != 0:
                    v = v + RatFun.const(mu[k]) * fn
            out.append(v)
        return tuple(out)

    particular_vec = assemble(particular_mu, True)
    basis_vecs = []
    for vec in null_mu:
        hv = assemble(vec, False)
        if any(not f.is_zero() for f in hv):
            basis_vecs.append(hv)

    space = VectorSolutionSpace(
        Status.SOLVED,
        particular=particular_vec,
        homogeneous_basis=tuple(basis_vecs),
        scalar_traces=tuple(traces),
    )
    _verify_system(ds, m, c, space)
    return space


def _verify_system(ds, m, c, space: VectorSolutionSpace):
    def check(vec, inhomog: bool):
        lhs = [apply_sigma(ds, v, 1) for v in vec]
        rhs = m.mat_vec(list(vec))
        if inhomog:
            rhs = [a + b for a, b in zip(rhs, c)]
        for a, b in zip(lhs, rhs):
            if a != b:
                raise InternalVerificationError("system solution failed substitution")

    if space.particular is not None:
        check(space.particular, True)
    for vec in space.homogeneous_basis:
        check(vec, False)


# ---------------------------------------------------------------------------
# brute-force oracle (test use only)
# ---------------------------------------------------------------------------


def brute_force_oracle(
    ds: DiffStructure,
    eq: ScalarDiffEq,
    deg_bound: int,
    universal_den: Poly | None = None,
) -> SolutionSpace:
    """Exhaustive ansatz solver for cross-checking solve_scalar in tests.

    Tries y = (sum_j alpha_j x^j)/u with j <= deg_bound and u a supplied
    universal denominator, applying the operator to each basis function with
    plain rational-function arithmetic (no degree analysis, no polynomial
    identity shortcuts).
    """
    if deg_bound > 12:
        raise PreconditionError("oracle degree bound capped at 12")
    u = universal_den if universal_den is not None else universal_denominator(eq)
    u_rf = RatFun.from_poly(u)
    mask = eq.fixed_mask()
    free_slots = [k for k, v in enumerate(mask) if v is None]
    fixed_rhs = RatFun.zero()
    for k, v in enumerate(mask):
        if v is not None:
            fixed_rhs = fixed_rhs + RatFun.const(v) * eq.rhs_basis[k]

    columns: list[RatFun] = []
    for j in range(deg_bound + 1):
        basis_fn = RatFun(Poly.monomial(1, j), u)
        columns.append(eq.apply_operator(basis_fn))
    for k in free_slots:
        columns.append(-eq.rhs_basis[k])

    den = fixed_rhs.den
    for col in columns:
        den = poly_lcm(den, col.den)
    den_rf = RatFun.from_poly(den)
    col_polys = [(col * den_rf).num for col in columns]
    rhs_poly = (fixed_rhs * den_rf).num
    max_e = max([p.degree for p in col_polys] + [rhs_poly.degree, 0])
    rows = [[p[e] for p in col_polys] for e in range(max_e + 1)]
    rhs_vec = [rhs_poly[e] for e in range(max_e + 1)]
    particular, nullsp = solve_affine(rows, rhs_vec, RAT_ZERO, RAT_ONE)

    def unpack(vec, homogeneous: bool):
        z = Poly(vec[: deg_bound + 1])
        g = RatFun(z, u)
        lam = [RAT_ZERO] * len(eq.rhs_basis) if homogeneous else list(
            v if v is not None else RAT_ZERO for v in mask
        )
        for slot, value in zip(free_slots, vec[deg_bound + 1 :]):
            lam[slot] = value
        return g, tuple(lam)

    basis = tuple(unpack(v, True) for v in nullsp)
    basis = tuple(p for p in basis if not (p[0].is_zero() and all(v == 0 for v in p[1])))
    if particular is None:
        return SolutionSpace(
            Status.NO_SOLUTION,
            homogeneous_basis=basis,
            witness="oracle: no solution within the supplied ansatz",
            universal_den=u,
            degree_bound=deg_bound,
        )
    space = SolutionSpace(
        Status.SOLVED,
        particular=unpack(particular, False),
        homogeneous_basis=basis,
        universal_den=u,
        degree_bound=deg_bound,
    )
    _verify_space(eq, space)
    return space
