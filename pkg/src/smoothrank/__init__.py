"""Joint feature imputation and multi-label prediction by smoothed-rank ascent.

The package completes a partially observed stacked matrix [labels, features,
ones] by maximizing a Gaussian-smoothed rank surrogate over box constraints,
annealing the smoothing width toward zero. See README.md for a tour.
"""

from .box import BoxBounds, build_bounds, is_feasible, project
from .data import (
    ColumnTransform,
    Dataset,
    MaskSpec,
    SyntheticModel,
    block_loss,
    load_arff,
    load_csv,
    load_masks,
    mcar_mask,
    save_masks,
    standardize,
    synthesize,
)
from .diagnostics import (
    AffineObservationOperator,
    QraCheckReport,
    RecoveryBound,
    alpha_delta,
    qra_check,
    rank_assumption_holds,
    recovery_bound,
    spherical_section_estimate,
)
from .errors import (
    BoundUndefinedError,
    DecompositionError,
    DegenerateColumnError,
    DegenerateInstanceError,
    DivergenceError,
    EmptyTrainingError,
    InvalidInstanceError,
    ParseError,
    SchemaError,
    SmoothRankError,
    TrivialNullSpaceError,
    UndefinedAUCError,
    UnsupportedAttributeError,
)
from .model import (
    ProblemInstance,
    SolverConfig,
    SolverReport,
    StackedMatrix,
    stack,
    unstack,
)
from .objective import (
    QraFamily,
    QraProfile,
    SpectralDecomposition,
    approx_rank,
    decompose,
    qra_derivative,
    qra_value,
    smoothed_rank,
    smoothed_rank_gradient,
)
from .evaluation import (
    ExperimentSpec,
    ResultRow,
    auc,
    build_instance,
    cross_validate,
    evaluate_labels,
    feature_rmse,
    method_name,
    render_report,
    rows_from_csv,
    run_experiment,
)
from .solvers import (
    Method,
    SpgState,
    anneal,
    bb_step_length,
    initial_delta,
    nonmonotone_accept,
    pg_inner,
    spg_inner,
)

__version__ = "0.1.0"

__all__ = [
    "AffineObservationOperator",
    "BoxBounds",
    "ColumnTransform",
    "Dataset",
    "ExperimentSpec",
    "MaskSpec",
    "Method",
    "ProblemInstance",
    "QraCheckReport",
    "QraFamily",
    "QraProfile",
    "RecoveryBound",
    "ResultRow",
    "SolverConfig",
    "SolverReport",
    "SpectralDecomposition",
    "SpgState",
    "StackedMatrix",
    "SyntheticModel",
    "alpha_delta",
    "anneal",
    "approx_rank",
    "auc",
    "bb_step_length",
    "block_loss",
    "build_bounds",
    "build_instance",
    "cross_validate",
    "decompose",
    "evaluate_labels",
    "feature_rmse",
    "initial_delta",
    "is_feasible",
    "load_arff",
    "load_csv",
    "load_masks",
    "mcar_mask",
    "method_name",
    "nonmonotone_accept",
    "pg_inner",
    "project",
    "qra_check",
    "qra_derivative",
    "qra_value",
    "rank_assumption_holds",
    "recovery_bound",
    "render_report",
    "rows_from_csv",
    "run_experiment",
    "save_masks",
    "smoothed_rank",
    "smoothed_rank_gradient",
    "spg_inner",
    "spherical_section_estimate",
    "stack",
    "standardize",
    "synthesize",
    "unstack",
    "SmoothRankError",
    "InvalidInstanceError",
    "DegenerateInstanceError",
    "DecompositionError",
    "DivergenceError",
    "BoundUndefinedError",
    "TrivialNullSpaceError",
    "SchemaError",
    "ParseError",
    "UnsupportedAttributeError",
    "DegenerateColumnError",
    "EmptyTrainingError",
    "UndefinedAUCError",
]
