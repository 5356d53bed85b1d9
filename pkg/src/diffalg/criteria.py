"""Decision procedures for differential dependence of difference-equation
solutions.

Every positive verdict carries a certificate that is re-verified by exact
substitution before it is returned: a telescoper identity, a twisted-ratio
witness, a first-order witness f (with the extra d*x^r term in the resonant
q case), a conjugating matrix B, or a summation witness h.  Negative
verdicts are certified by the rational-solution engines (pole-orbit or
degree obstructions); the telescoper search alone is bounded by the caller's
order bound and a None result means only "none of order <= bound".
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .dispersion import is_standard, multiplicative_standard_form, _strip_x_power
from .errors import (
    BoundExceededError,
    InternalVerificationError,
    NonStandardInputError,
    PreconditionError,
    SingularMatrixError,
    ZeroInputError,
)
from .numcore import RAT_ONE, Rat, RatFun
from .solver import (
    MatrixRF,
    ScalarDiffEq,
    SolutionSpace,
    Status,
    _q_power_log,
    solve_first_order,
    solve_system,
)
from .structures import ConstLinDiffOp, DiffStructure, apply_derivation, apply_op, apply_sigma


# ---------------------------------------------------------------------------
# telescopers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Telescoper:
    """Operators L_1..L_n (not all zero) and a certificate g with
    sum_i L_i(a_i) = sigma(g) - g for the inputs it was produced from."""

    operators: tuple[ConstLinDiffOp, ...]
    certificate_g: RatFun

    def is_nonzero(self) -> bool:
        return any(not op.is_zero() for op in self.operators)


def _check_bound(sol: SolutionSpace):
    if sol.status is Status.BOUND_EXCEEDED:
        raise BoundExceededError(sol.witness or "degree cap exceeded")


def verify_telescoper(ds: DiffStructure, funcs, tele: Telescoper) -> bool:
    total = RatFun.zero()
    for op, fn in zip(tele.operators, funcs):
        total = total + apply_op(ds, op, fn)
    lhs = apply_sigma(ds, tele.certificate_g) - tele.certificate_g
    return total == lhs and tele.is_nonzero()


def find_telescoper(
    ds: DiffStructure, funcs, order_bound: int, degree_cap: int | None = None
) -> Telescoper | None:
    """Search for constant-coefficient operators L_i of order <= order_bound
    with sum_i L_i(a_i) = sigma(g) - g, g rational.

    None means no telescoper of order <= order_bound exists; it is not an
    unconditional transcendence verdict.
    """
    if order_bound < 0:
        raise PreconditionError("order bound must be >= 0")
    funcs = [RatFun._coerce(f) for f in funcs]
    if not funcs:
        raise PreconditionError("need at least one input function")
    basis: list[RatFun] = []
    for fn in funcs:
        current = fn
        for j in range(order_bound + 1):
            if j > 0:
                current = apply_derivation(ds, current)
            basis.append(current)
    sol = solve_first_order(ds, RatFun.one(), rhs_basis=basis, degree_cap=degree_cap)
    _check_bound(sol)
    chosen = None
    for g, lam in sol.homogeneous_basis:
        if any(v != 0 for v in lam):
            chosen = (g, lam)
            break
    if chosen is None:
        return None
    g, lam = chosen
    width = order_bound + 1
    ops = tuple(
        ConstLinDiffOp(lam[i * width : (i + 1) * width]) for i in range(len(funcs))
    )
    tele = Telescoper(ops, g)
    if not verify_telescoper(ds, funcs, tele):
        raise InternalVerificationError("telescoper failed substitution")
    return tele


def mult_dependence_test(
    ds: DiffStructure, funcs, order_bound: int, degree_cap: int | None = None
) -> Telescoper | None:
    """Telescoper search applied to the logarithmic derivatives d(b_i)/b_i."""
    funcs = [RatFun._coerce(f) for f in funcs]
    if any(f.is_zero() for f in funcs):
        raise ZeroInputError("multiplicative test needs nonzero inputs")
    logs = [apply_derivation(ds, f) / f for f in funcs]
    return find_telescoper(ds, logs, order_bound, degree_cap=degree_cap)


# ---------------------------------------------------------------------------
# first-order differential-algebraicity
# ---------------------------------------------------------------------------


class DAStatus(Enum):
    DIFFERENTIALLY_ALGEBRAIC = "DifferentiallyAlgebraic"
    DIFFERENTIALLY_TRANSCENDENTAL = "DifferentiallyTranscendental"
    RATIONAL_SOLUTION_EXISTS = "RationalSolutionExists"


@dataclass(frozen=True)
class DACertificate:
    f: RatFun | None = None
    c: Rat | None = None
    n_or_r: int | None = None
    d: Rat | None = None


@dataclass(frozen=True)
class DAVerdict:
    status: DAStatus
    certificate: DACertificate | None
    hypothesis_notes: str


def _monomial_shape(f: RatFun) -> tuple[Rat, int] | None:
    """(c, n) with f = c*x^n (n in Z), or None."""
    num, den = f.num, f.den
    num_stripped, vn = _strip_x_power(num)
    den_stripped, vd = _strip_x_power(den)
    if num_stripped.degree != 0 or den_stripped.degree != 0:
        return None
    return num_stripped.lc() / den_stripped.lc(), vn - vd


def hypergeom_da_test(ds: DiffStructure, b: RatFun) -> DAVerdict:
    """Differential algebraicity of a nonzero solution of sigma(u) = b*u.

    After the multiplicative standard form b = b_std * sigma(g)/g, the
    verdict reduces to the shape of b_std: a constant (shift) or c*x^n
    (q case) means differentially algebraic, anything else is an
    unconditional transcendence verdict from the pole-orbit obstruction.
    """
    b = RatFun._coerce(b)
    if b.is_zero():
        raise ZeroInputError("hypergeometric test needs b != 0")
    mform = multiplicative_standard_form(ds, b)
    b_std, g = mform.standard_part, mform.certificate_g
    notes = "assumes a nonzero solution of sigma(u) = b*u meromorphic on the relevant domain"
    if ds.is_shift:
        if b_std.is_constant():
            cert = DACertificate(f=g, c=b_std.const_value(), n_or_r=0)
            _verify_twisted_ratio(ds, b, cert)
            return DAVerdict(DAStatus.DIFFERENTIALLY_ALGEBRAIC, cert, notes)
        return DAVerdict(DAStatus.DIFFERENTIALLY_TRANSCENDENTAL, None, notes)
    shape = _monomial_shape(b_std)
    if shape is not None:
        c, n = shape
        cert = DACertificate(f=g, c=c, n_or_r=n)
        _verify_twisted_ratio(ds, b, cert)
        return DAVerdict(DAStatus.DIFFERENTIALLY_ALGEBRAIC, cert, notes)
    return DAVerdict(DAStatus.DIFFERENTIALLY_TRANSCENDENTAL, None, notes)


def _verify_twisted_ratio(ds: DiffStructure, b: RatFun, cert: DACertificate):
    f = cert.f
    n = cert.n_or_r or 0
    xn = RatFun.x() ** n if n >= 0 else RatFun.one() / (RatFun.x() ** (-n))
    expected = RatFun.const(cert.c) * xn * apply_sigma(ds, f) / f
    if expected != b:
        raise InternalVerificationError("twisted-ratio certificate failed substitution")


def inhomog_da_classify(
    ds: DiffStructure, a: RatFun, b: RatFun, degree_cap: int | None = None
) -> DAVerdict:
    """Differential algebraicity of a solution z of sigma(z) = a*z + b.

    Requires a in standard form (normalise with multiplicative_standard_form
    first).  Verdicts:

    * a not constant (shift) / not c*x^n (q): transcendental, unless the
      equation itself has a rational solution, in which case the answer
      depends on whether z is that rational solution and the status reports
      RationalSolutionExists.
    * a constant (shift): algebraic iff b = sigma(f) - a*f is solvable.
    * a = c*x^n (q): algebraic iff b = sigma(f) - a*f (+ d*x^r when a = q^r)
      is solvable.
    """
    a = RatFun._coerce(a)
    b = RatFun._coerce(b)
    if a.is_zero():
        raise PreconditionError("twist a must be nonzero")
    if not is_standard(ds, a):
        raise NonStandardInputError(
            "a must be standard; divide out sigma(g)/g via multiplicative_standard_form"
        )
    base_note = "hypotheses inherited from the classification: z solves sigma(z) = a*z + b"

    def solve_b(extra_basis=(), extra_fixed=()):
        basis = [b] + list(extra_basis)
        fixed = [RAT_ONE] + list(extra_fixed)
        return solve_first_order(ds, a, rhs_basis=basis, lambda_fixed=fixed, degree_cap=degree_cap)

    if ds.is_shift:
        if a.is_constant():
            sol = solve_b()
            _check_bound(sol)
            if sol.is_solved():
                cert = DACertificate(f=sol.particular[0], c=a.const_value())
                return DAVerdict(
                    DAStatus.DIFFERENTIALLY_ALGEBRAIC,
                    cert,
                    base_note + "; constant a: every solution is differentially algebraic",
                )
            return DAVerdict(
                DAStatus.DIFFERENTIALLY_TRANSCENDENTAL,
                None,
                base_note + "; z is automatically irrational since b = sigma(f) - a*f has no rational solution",
            )
        sol = solve_b()
        _check_bound(sol)
        if sol.is_solved():
            return DAVerdict(
                DAStatus.RATIONAL_SOLUTION_EXISTS,
                DACertificate(f=sol.particular[0]),
                base_note + "; the classification assumes z is not in Q(x), "
                "but sigma(z) = a*z + b has the rational solution reported as f; "
                "any solution z not in Q(x) is differentially transcendental",
            )
        return DAVerdict(
            DAStatus.DIFFERENTIALLY_TRANSCENDENTAL,
            None,
            base_note + "; nonconstant standard a",
        )

    shape = _monomial_shape(a)
    if shape is None:
        sol = solve_b()
        _check_bound(sol)
        if sol.is_solved():
            return DAVerdict(
                DAStatus.RATIONAL_SOLUTION_EXISTS,
                DACertificate(f=sol.particular[0]),
                base_note + "; the classification assumes z is not in Q(x), "
                "but sigma(z) = a*z + b has the rational solution reported as f; "
                "any solution z not in Q(x) is differentially transcendental",
            )
        return DAVerdict(
            DAStatus.DIFFERENTIALLY_TRANSCENDENTAL,
            None,
            base_note + "; a is standard and not of the form c*x^n",
        )
    c, n = shape
    r = _q_power_log(ds, c) if n == 0 else None
    if r is not None:
        xr = RatFun.x() ** r if r >= 0 else RatFun.one() / (RatFun.x() ** (-r))
        sol = solve_first_order(
            ds, a, rhs_basis=[b, xr], lambda_fixed=[RAT_ONE, None], degree_cap=degree_cap
        )
        _check_bound(sol)
        if sol.is_solved():
            g, lam = sol.particular
            cert = DACertificate(f=g, c=c, n_or_r=r, d=-lam[1])
            return DAVerdict(
                DAStatus.DIFFERENTIALLY_ALGEBRAIC,
                cert,
                base_note + f"; resonant case a = q^{r}",
            )
        return DAVerdict(DAStatus.DIFFERENTIALLY_TRANSCENDENTAL, None, base_note)
    sol = solve_b()
    _check_bound(sol)
    if sol.is_solved():
        cert = DACertificate(f=sol.particular[0], c=c, n_or_r=n)
        return DAVerdict(
            DAStatus.DIFFERENTIALLY_ALGEBRAIC,
            cert,
            base_note + "; a = c*x^n: every solution is differentially algebraic",
        )
    return DAVerdict(DAStatus.DIFFERENTIALLY_TRANSCENDENTAL, None, base_note)


# ---------------------------------------------------------------------------
# matrix integrability
# ---------------------------------------------------------------------------


class IntegrabilityStatus(Enum):
    CONSTANT_CONJUGATE = "ConstantConjugate"
    NOT_CONSTANT_CONJUGATE = "NotConstantConjugate"


@dataclass(frozen=True)
class IntegrabilityResult:
    status: IntegrabilityStatus
    b_matrix: MatrixRF | None
    scalar_trace: ScalarDiffEq | None
    scalar_traces: tuple[ScalarDiffEq, ...] = ()


def integrability_test(
    ds: DiffStructure, a_matrix: MatrixRF, degree_cap: int | None = None
) -> IntegrabilityResult:
    """Decide whether sigma(B) = A*B*A^-1 + d(A)*A^-1 has a rational matrix
    solution B (equivalently, whether the associated group is conjugate to a
    group of derivation constants).

    The matrix equation is flattened to a first-order system on the n^2
    entries of B (row-major), which is then uncoupled coordinate by
    coordinate; a positive answer returns a substitution-verified B.
    """
    n = a_matrix.n
    try:
        a_inv = a_matrix.inverse()
    except SingularMatrixError:
        raise
    da = a_matrix.map(lambda f: apply_derivation(ds, f))
    inhom = da @ a_inv
    c_vec = [inhom.entries[r][s] for r in range(n) for s in range(n)]
    rows = []
    for r in range(n):
        for s in range(n):
            row = []
            for u in range(n):
                for v in range(n):
                    row.append(a_matrix.entries[r][u] * a_inv.entries[v][s])
            rows.append(row)
    big_m = MatrixRF(rows)
    sol = solve_system(ds, big_m, c_vec, degree_cap=degree_cap)
    if sol.status is Status.BOUND_EXCEEDED:
        raise BoundExceededError(sol.witness or "degree cap exceeded in system solve")
    if sol.status is Status.NO_SOLUTION:
        trace = None
        if sol.obstructed_coordinate is not None and sol.scalar_traces:
            trace = sol.scalar_traces[sol.obstructed_coordinate]
        elif sol.scalar_traces:
            trace = sol.scalar_traces[0]
        return IntegrabilityResult(
            IntegrabilityStatus.NOT_CONSTANT_CONJUGATE, None, trace, sol.scalar_traces
        )
    flat = sol.particular
    b_matrix = MatrixRF([[flat[r * n + s] for s in range(n)] for r in range(n)])
    lhs = b_matrix.map(lambda f: apply_sigma(ds, f))
    rhs = (a_matrix @ b_matrix) @ a_inv
    for r in range(n):
        for s in range(n):
            if lhs.entries[r][s] != rhs.entries[r][s] + inhom.entries[r][s]:
                raise InternalVerificationError("conjugating matrix failed substitution")
    return IntegrabilityResult(
        IntegrabilityStatus.CONSTANT_CONJUGATE,
        b_matrix,
        sol.scalar_traces[0] if sol.scalar_traces else None,
        sol.scalar_traces,
    )


def companion_matrix(ds: DiffStructure, coeffs) -> MatrixRF:
    """Companion matrix of sum_i p_i * sigma^i(y) = 0 acting on
    (y, sigma(y), ..., sigma^(m-1)(y)): last row -p_i/p_m."""
    coeffs = [RatFun._coerce(c) for c in coeffs]
    m = len(coeffs) - 1
    if m < 1 or coeffs[m].is_zero():
        raise PreconditionError("companion matrix needs a nonzero leading coefficient")
    rows = []
    for i in range(m - 1):
        rows.append([RatFun.one() if j == i + 1 else RatFun.zero() for j in range(m)])
    rows.append([-(coeffs[j] / coeffs[m]) for j in range(m)])
    return MatrixRF(rows)


# ---------------------------------------------------------------------------
# inverse-problem classification for sigma(y) - y = f
# ---------------------------------------------------------------------------


class GroupKind(Enum):
    TRIVIAL = "TrivialGroup"
    CONSTANTS_GA = "ConstantsGa"
    FULL_GA = "FullGa"


@dataclass(frozen=True)
class GroupClass:
    kind: GroupKind
    certificate_h: RatFun | None = None
    certificate_c: Rat | None = None


def group_classify_inhomog_sum(
    ds: DiffStructure, f: RatFun, degree_cap: int | None = None
) -> GroupClass:
    """Classify the symmetry group attached to sigma(y) - y = f over Q(x):

    * trivial when f = sigma(h) - h for rational h,
    * (q case only) the derivation-constant points when f = sigma(h) - h + c
      with a nonzero constant c,
    * the full additive group otherwise.
    """
    f = RatFun._coerce(f)
    one = RatFun.one()
    sol = solve_first_order(ds, one, rhs_basis=[f], lambda_fixed=[RAT_ONE], degree_cap=degree_cap)
    _check_bound(sol)
    if sol.is_solved():
        h = sol.particular[0]
        if apply_sigma(ds, h) - h != f:
            raise InternalVerificationError("summation witness failed substitution")
        return GroupClass(GroupKind.TRIVIAL, h)
    if not ds.is_shift:
        sol2 = solve_first_order(
            ds, one, rhs_basis=[f, RatFun.one()], lambda_fixed=[RAT_ONE, None], degree_cap=degree_cap
        )
        _check_bound(sol2)
        if sol2.is_solved():
            h, lam = sol2.particular
            c = -lam[1]
            if c == 0 or apply_sigma(ds, h) - h + RatFun.const(c) != f:
                raise InternalVerificationError("constants-level witness failed")
            return GroupClass(GroupKind.CONSTANTS_GA, h, c)
    return GroupClass(GroupKind.FULL_GA)
