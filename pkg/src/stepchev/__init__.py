"""Polynomial approximation of step functions on unions of disjoint segments,
with computable error certificates and a numerical minimax oracle."""

from .amplify import (
    PipelineReport,
    amplifier,
    choose_best,
    eps_general,
    general_pipeline,
    jackson_base,
    self_amplify,
    vertex_decomposition,
)
from .bernstein import (
    BernsteinPolynomial,
    bernstein_apply,
    chernoff_lower_tail,
    chernoff_upper_tail,
    divergence,
    eps_two,
    equal_two_segment,
    statement_bound,
    two_segment_approx,
)
from .certificates import BoundCertificate, Formula
from .errors import (
    ConstructionError,
    DegreeOverflowError,
    DisjointnessError,
    PreconditionError,
    ProblemFormatError,
    SandwichViolation,
    StepchevError,
)
from .intervals import (
    AffineMap,
    Interval,
    IntervalSystem,
    StepFunction,
    ValueSet,
    inflate,
    load_problem,
    normalize,
    parse_problem,
    system_stats,
)
from .newton import (
    NodeSystem,
    divided_differences,
    eps_small_delta,
    newton_eval,
    partition_bound,
    partition_of_unity,
    small_delta_approx,
    small_delta_for_system,
)
from .oracle import OracleResult, exact_binomial_tail, minimax_fit, sandwich
from .poly import GridSpec, Polynomial, compose, from_samples, sup_error, sup_norm

__version__ = "0.1.0"
