"""Exact decision procedures for differential transcendence of solutions of
linear difference and q-difference equations over Q(x).

The package decides, with machine-checkable certificates, whether solutions
of first-order and higher-order linear (q-)difference equations satisfy any
polynomial differential equation: telescoper searches for indefinite sums,
the twisted-ratio test for hypergeometric-type products, the full
classification for sigma(z) = a*z + b, a matrix integrability test, and the
inverse-problem classification of sigma(y) - y = f.  Everything reduces to
rational-solution problems solved in exact arithmetic; positive verdicts are
re-verified by substitution and negative verdicts carry obstruction
witnesses.
"""

from .dispersion import (
    MultStandardForm,
    StandardDecomp,
    additive_standard_decomp,
    dispersion,
    is_standard,
    multiplicative_standard_form,
    polar_dispersion,
)
from .criteria import (
    DACertificate,
    DAStatus,
    DAVerdict,
    GroupClass,
    GroupKind,
    IntegrabilityResult,
    IntegrabilityStatus,
    Telescoper,
    companion_matrix,
    find_telescoper,
    group_classify_inhomog_sum,
    hypergeom_da_test,
    inhomog_da_classify,
    integrability_test,
    mult_dependence_test,
    verify_telescoper,
)
from .errors import (
    BoundExceededError,
    DiffAlgError,
    InternalVerificationError,
    NonStandardInputError,
    ParseError,
    PreconditionError,
    SingularMatrixError,
    ZeroInputError,
)
from .numcore import (
    Poly,
    Rat,
    RatFun,
    partial_split,
    poly_gcd,
    poly_resultant,
    rational_roots,
    squarefree_decomposition,
)
from .parsing import format_matrix, format_ratfun, parse_matrix, parse_ratfun
from .solver import (
    MatrixRF,
    ScalarDiffEq,
    SolutionSpace,
    Status,
    VectorSolutionSpace,
    brute_force_oracle,
    eliminate_coordinate,
    scalar_eq_from_ratfun_coeffs,
    solve_first_order,
    solve_scalar,
    solve_system,
    universal_denominator,
)
from .structures import (
    ConstLinDiffOp,
    DiffStructure,
    apply_derivation,
    apply_op,
    apply_sigma,
    q_structure,
    shift_structure,
)

__version__ = "0.1.0"

__all__ = [
    "BoundExceededError",
    "ConstLinDiffOp",
    "DACertificate",
    "DAStatus",
    "DAVerdict",
    "DiffAlgError",
    "DiffStructure",
    "GroupClass",
    "GroupKind",
    "IntegrabilityResult",
    "IntegrabilityStatus",
    "InternalVerificationError",
    "MatrixRF",
    "MultStandardForm",
    "NonStandardInputError",
    "ParseError",
    "Poly",
    "PreconditionError",
    "Rat",
    "RatFun",
    "ScalarDiffEq",
    "SingularMatrixError",
    "SolutionSpace",
    "StandardDecomp",
    "Status",
    "Telescoper",
    "VectorSolutionSpace",
    "ZeroInputError",
    "additive_standard_decomp",
    "apply_derivation",
    "apply_op",
    "apply_sigma",
    "brute_force_oracle",
    "companion_matrix",
    "dispersion",
    "eliminate_coordinate",
    "find_telescoper",
    "format_matrix",
    "format_ratfun",
    "group_classify_inhomog_sum",
    "hypergeom_da_test",
    "inhomog_da_classify",
    "integrability_test",
    "is_standard",
    "mult_dependence_test",
    "multiplicative_standard_form",
    "parse_matrix",
    "parse_ratfun",
    "partial_split",
    "polar_dispersion",
    "poly_gcd",
    "poly_resultant",
    "q_structure",
    "rational_roots",
    "scalar_eq_from_ratfun_coeffs",
    "shift_structure",
    "solve_first_order",
    "solve_scalar",
    "solve_system",
    "squarefree_decomposition",
    "universal_denominator",
    "verify_telescoper",
]
