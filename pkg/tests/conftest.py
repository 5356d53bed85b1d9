"""Shared helpers for the test suite: expression-based constructors, seeded
random generators, and the big randomized suites reused by the acceptance
tests."""

from __future__ import annotations

import random

from diffalg import (
    Poly,
    Rat,
    RatFun,
    ScalarDiffEq,
    Status,
    additive_standard_decomp,
    apply_derivation,
    apply_sigma,
    brute_force_oracle,
    is_standard,
    multiplicative_standard_form,
    parse_ratfun,
    polar_dispersion,
    q_structure,
    shift_structure,
    solve_scalar,
)

SHIFT = shift_structure()
Q2 = q_structure(2)
Q14 = q_structure(Rat(1, 4))
QM3 = q_structure(-3)


def rf(text: str) -> RatFun:
    return parse_ratfun(text)


def pp(text: str) -> Poly:
    f = parse_ratfun(text)
    assert f.is_polynomial(), text
    return f.num * (1 / f.den.lc())


def rand_poly(rng: random.Random, max_deg: int, lo: int = -6, hi: int = 6, nonzero: bool = False) -> Poly:
    while True:
        deg = rng.randint(0, max_deg)
        coeffs = [rng.randint(lo, hi) for _ in range(deg)] + [rng.choice([1, 2, 3, -1, -2, 5])]
        p = Poly(coeffs)
        if not nonzero or not p.is_zero():
            return p


def rand_denominator(rng: random.Random, ds, max_factors: int = 3) -> Poly:
    """Product of small linear/quadratic factors, some in shared orbits, so
    dispersion machinery gets exercised; never zero at the origin for the q
    case unless explicitly allowed."""
    den = Poly.one()
    pool_shift = [-3, -2, -1, 0, 1, 2, 3]
    pool_q = [1, 2, 3, 4, -1, -2, 8]
    pool = pool_shift if ds.is_shift else pool_q
    for _ in range(rng.randint(1, max_factors)):
        kind = rng.random()
        if kind < 0.7:
            root = rng.choice(pool)
            den = den * Poly([-root, 1]) ** rng.randint(1, 2)
        else:
            den = den * Poly([rng.randint(1, 5), rng.randint(-3, 3), 1])
    return den


def rand_ratfun(rng: random.Random, ds, with_pole: bool = False) -> RatFun:
    num = rand_poly(rng, 3, nonzero=True)
    if with_pole:
        while True:
            den = rand_denominator(rng, ds)
            f = RatFun(num, den)
            stripped = _nonx_part(f.den) if not ds.is_shift else f.den
            if stripped.degree > 0:
                return f
    if rng.random() < 0.4:
        return RatFun(num)
    return RatFun(num, rand_denominator(rng, ds))


def _nonx_part(p: Poly) -> Poly:
    v = p.valuation()
    return Poly(p.coeffs[v:]) if v > 0 else p


# ---------------------------------------------------------------------------
# randomized suites shared with the acceptance tests
# ---------------------------------------------------------------------------


def run_positive_pdisp_suite(ds, count: int, seed: int) -> int:
    """pdisp(sigma(f) - a*f) >= 1 for f with a pole (nonzero pole in the q
    case) and constant a != 0.  Returns the number of checked cases."""
    rng = random.Random(seed)
    done = 0
    while done < count:
        f = rand_ratfun(rng, ds, with_pole=True)
        a = Rat(rng.choice([1, 1, 2, -1, 3, -2]), rng.choice([1, 1, 2]))
        g = apply_sigma(ds, f) - RatFun.const(a) * f
        assert polar_dispersion(ds, g) >= 1, (f, a)
        done += 1
    return done


def run_standard_roundtrip_suite(ds, count: int, seed: int) -> int:
    """Additive and multiplicative standard decompositions verify exactly."""
    rng = random.Random(seed)
    done = 0
    while done < count:
        f = rand_ratfun(rng, ds)
        a = Rat(rng.choice([1, 2, -1, 3, 5]), rng.choice([1, 2]))
        decomp = additive_standard_decomp(ds, f, a)
        assert decomp.reconstruct() == f
        assert polar_dispersion(ds, decomp.standard_part) == 0
        if not f.is_zero():
            mform = multiplicative_standard_form(ds, f)
            assert mform.reconstruct() == f
            assert is_standard(ds, mform.standard_part)
        done += 1
    return done


def rand_scalar_eq(rng: random.Random, ds) -> ScalarDiffEq:
    order = rng.randint(1, 2)
    coeffs = []
    for i in range(order + 1):
        if i in (0, order):
            coeffs.append(rand_poly(rng, 3, nonzero=True))
        else:
            coeffs.append(rand_poly(rng, 3) if rng.random() < 0.8 else Poly.zero())
    style = rng.random()
    if style < 0.3:
        return ScalarDiffEq(ds, tuple(coeffs))
    if style < 0.65:
        rhs = RatFun.from_poly(rand_poly(rng, 2, nonzero=True))
    else:
        rhs = RatFun(rand_poly(rng, 2, nonzero=True), rand_denominator(rng, ds, max_factors=2))
    return ScalarDiffEq(ds, tuple(coeffs), (rhs,), (Rat(1),))


def run_oracle_agreement_suite(ds, count: int, seed: int, max_attempts: int = 10_000) -> int:
    """solve_scalar vs the brute-force ansatz oracle on random instances.

    The oracle's numerator ansatz is hard-capped at degree 12, so instances
    whose certified degree bound exceeds 12 are redrawn (the oracle could not
    see the full space there); agreement must be exact on every compared
    instance.
    """
    rng = random.Random(seed)
    compared = 0
    attempts = 0
    while compared < count:
        attempts += 1
        assert attempts < max_attempts, "instance generator exhausted"
        eq = rand_scalar_eq(rng, ds)
        sol = solve_scalar(eq)
        if sol.status is Status.BOUND_EXCEEDED:
            continue
        if sol.degree_bound is not None and sol.degree_bound > 12:
            continue
        oracle = brute_force_oracle(ds, eq, 12)
        assert (sol.status is Status.SOLVED) == (oracle.status is Status.SOLVED), eq
        assert sol.homogeneous_dimension() == oracle.homogeneous_dimension(), eq
        compared += 1
    return compared
