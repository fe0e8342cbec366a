"""Solver library for linear and weakly nonlinear boundary-value problems
of first-order difference systems, specializing in the resonance case where
the induced boundary operator is singular."""

from .boundary import BoundaryOperator, generic, initial_mass, multipoint, periodic
from .linalg import (
    DecompositionError,
    RankDecision,
    cokernel_projector,
    kernel_projector,
    numerical_rank,
    pseudoinverse,
)
from .linear import (
    CLASSICAL,
    FAMILY,
    QUASISOLUTION,
    LinearBVP,
    OperatorSequence,
    SolutionFamily,
    SolvabilityReport,
    assemble_Q,
    assemble_h,
    boundary_residual,
    classify,
    evolution,
    green_apply,
    particular_forced,
    recurrence_residual,
    solve_family,
    transition_stack,
)
from .lotka_volterra import (
    LotkaVolterraSpec,
    fib,
    fib_delta,
    fib_delta_exponent_offset,
    fib_green_coeffs,
    fib_green_matrix_oracle,
    fib_matrix_power,
    fib_periodic_particular,
    fib_solvability,
    lv_callables,
    lv_derivative,
    lv_nonlinearity,
)
from .nonlinear import (
    DerivativeMismatchError,
    GeneratingFamilyError,
    GeneratingRoot,
    IterationTrace,
    NonlinearProblem,
    SufficiencyCheck,
    SufficiencyError,
    assemble_B0,
    check_sufficient,
    generating_F,
    iterate,
    nonlinear_recurrence_residual,
    solve_generating,
    verify_derivative,
)
from .problem_io import (
    Problem,
    ProblemFormatError,
    canonical_json,
    load_problem,
    parse_problem,
    rotation_matrix,
)

__version__ = "0.1.0"
