"""Exact solvers and a verification lab for quota-constrained persuasion.

A sender commits to a signaling scheme; a receiver best-responds subject
to lower/upper bounds (quotas) on the overall probability of each action.
The package provides the closed-form binary solver, an exact-rational LP
engine with the obedience-constrained sender LP, the receiver's
lexicographic best response, a brute-force grid oracle with resolution
bounds, and seeded fuzz/reproduction campaigns. All values are
`fractions.Fraction`; nothing is float-approximate.
"""

from .binary_solver import (
    InfeasibleConstraintsError,
    NotBinaryError,
    NotPartiallyAlignedError,
    effective_bounds,
    solve_binary,
)
from .lab import (
    FuzzReport,
    GeneratorExhaustedError,
    ReproReport,
    StructuralConditions,
    check_structural_conditions,
    fuzz_monotonicity,
    gen_instance,
    gen_nested_constraints,
    repro_examples,
)
from .linprog import LinearProgram, LpResult, solve_lex, solve_lp
from .model import (
    Classification,
    ConstraintProfile,
    ConstraintStatus,
    Instance,
    ResponsePolicy,
    SignalingScheme,
    Solution,
    UnreachableSignalError,
    ValidationError,
    check_constraints,
    classify_instance,
    compare_binding,
    dump_instance,
    evaluate,
    load_instance,
    posterior,
    rat,
    rat_str,
    vacuous_profile,
)
from .oracle import (
    GridReport,
    receiver_resolution_bound,
    sender_resolution_bound,
    solve_exante_grid,
)
from .response import (
    BestResponse,
    Derandomized,
    ExAnteIcReport,
    best_response_lex,
    check_ex_ante_ic,
    derandomize,
)
from .sender_lp import ExpostResult, solve_expost

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # model
    "Instance",
    "ConstraintProfile",
    "SignalingScheme",
    "ResponsePolicy",
    "Solution",
    "Classification",
    "ConstraintStatus",
    "ValidationError",
    "UnreachableSignalError",
    "rat",
    "rat_str",
    "classify_instance",
    "check_constraints",
    "compare_binding",
    "posterior",
    "evaluate",
    "load_instance",
    "dump_instance",
    "vacuous_profile",
    # linprog
    "LinearProgram",
    "LpResult",
    "solve_lp",
    "solve_lex",
    # response
    "BestResponse",
    "ExAnteIcReport",
    "Derandomized",
    "best_response_lex",
    "check_ex_ante_ic",
    "derandomize",
    # binary solver
    "NotBinaryError",
    "NotPartiallyAlignedError",
    "InfeasibleConstraintsError",
    "effective_bounds",
    "solve_binary",
    # sender LP
    "ExpostResult",
    "solve_expost",
    # oracle
    "GridReport",
    "solve_exante_grid",
    "sender_resolution_bound",
    "receiver_resolution_bound",
    # lab
    "GeneratorExhaustedError",
    "StructuralConditions",
    "FuzzReport",
    "ReproReport",
    "gen_instance",
    "gen_nested_constraints",
    "check_structural_conditions",
    "fuzz_monotonicity",
    "repro_examples",
]
