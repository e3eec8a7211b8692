"""Multiplicative (geometric-calculus) Runge-Kutta solvers.

Solves initial value problems of the form y*(x) = f(x,y), y(x0) = y0, where
y* is the multiplicative derivative, over complex-valued states represented
as phase-tracked logarithms.  Includes the two- and four-stage multiplicative
schemes, a classical RK4 baseline, a root-bypass hybrid, and an
error/convergence/timing harness.
"""

__version__ = "0.1.0"

from .analysis import (
    BenchSample,
    ErrorRecord,
    bench_csv,
    check_theorem_bound,
    estimate_order,
    fit_theorem_constants,
    global_error,
    lemma1_bound,
    lemma1_log_bound,
    local_error,
    time_error_sweep,
)
from .errors import (
    DegenerateError,
    DomainError,
    EvalError,
    ExprError,
    ExprSyntaxError,
    MulrkError,
    ShapeError,
    StepCountError,
    UnknownIdentifier,
    UnrecoverableZero,
)
from .geomcalc import (
    LogValue,
    from_complex,
    from_log,
    mdiv,
    mmul,
    mpow,
    mult_to_ordinary_state,
    numeric_star_derivative,
    ordinary_to_mult_rhs,
)
from .hybrid import HybridConfig, detect_handover, solve_hybrid
from .problems import (
    ProblemSpec,
    baranyi_reference,
    build,
    consistency_check,
    lookup,
    registry,
)
from .solvers import (
    MIvp,
    StepMeta,
    Trajectory,
    mrk2_step,
    mrk4_step,
    reduce_higher_order,
    rk4_step,
    solve,
)
from .tableau import (
    MButcherTableau,
    classical_mrk2,
    classical_mrk4,
    make_order2,
    validate_order2,
    validate_order4,
)

__all__ = [
    "BenchSample",
    "DegenerateError",
    "DomainError",
    "ErrorRecord",
    "EvalError",
    "ExprError",
    "ExprSyntaxError",
    "HybridConfig",
    "LogValue",
    "MButcherTableau",
    "MIvp",
    "MulrkError",
    "ProblemSpec",
    "ShapeError",
    "StepCountError",
    "StepMeta",
    "Trajectory",
    "UnknownIdentifier",
    "UnrecoverableZero",
    "baranyi_reference",
    "bench_csv",
    "build",
    "check_theorem_bound",
    "classical_mrk2",
    "classical_mrk4",
    "consistency_check",
    "detect_handover",
    "estimate_order",
    "fit_theorem_constants",
    "from_complex",
    "from_log",
    "global_error",
    "lemma1_bound",
    "lemma1_log_bound",
    "local_error",
    "lookup",
    "make_order2",
    "mdiv",
    "mmul",
    "mpow",
    "mrk2_step",
    "mrk4_step",
    "mult_to_ordinary_state",
    "numeric_star_derivative",
    "ordinary_to_mult_rhs",
    "reduce_higher_order",
    "registry",
    "rk4_step",
    "solve",
    "solve_hybrid",
    "time_error_sweep",
    "validate_order2",
    "validate_order4",
]
