"""Measuring lack of co-monotonicity (LOC) between paired variables.

The pipeline: normalize raw marks to [0, 1], fit a conditional-mean or
conditional-median curve to each ordered scatterplot by local linear
smoothing with a plug-in bandwidth, transfer the fitted curve onto an
equal-width step function, and evaluate the exact LOC index -- the weighted
gap between the curve and its increasing rearrangement.  Rank-based
coefficients (Spearman, Liebscher's zeta, the finite-population I) live
alongside for comparison, tied together by the identity
loc_index(rank_step_function(s)) == finite_population_I(s).
"""

from .association import (
    AssociationReport,
    LocMatrix,
    PsiFunction,
    Ranks,
    TiesError,
    empirical_ranks,
    finite_population_I,
    liebscher_zeta,
    loc_matrix,
    pearson,
    psi_norm_constant,
    rank_step_function,
    spearman,
)
from .bandwidth import (
    GAUSSIAN_KERNEL,
    BandwidthDiagnostics,
    BandwidthError,
    BandwidthEstimate,
    KernelConstants,
    dpi_bandwidth,
    median_adjust,
    oversmoothed_bandwidth,
    yu_jones_factor,
)
from .dataset import (
    DEFAULT_SCHEMA,
    ColumnSchema,
    NormalizedSample,
    PairedSample,
    ParseError,
    RawScores,
    SummaryStats,
    histogram,
    jitter,
    load_csv,
    normalize,
    pair,
    summarize,
)
from .rearrangement import (
    LocRefinement,
    LocValue,
    StepFunction,
    distribution,
    increasing_rearrangement,
    loc_index,
    loc_refined,
    step_from_curve,
)
from .smoothing import (
    FitSpec,
    FittedCurve,
    LossKind,
    SmoothingError,
    check_loss_objective,
    fit_curve,
    local_linear_fit,
)

__version__ = "0.1.0"

__all__ = [
    "AssociationReport",
    "BandwidthDiagnostics",
    "BandwidthError",
    "BandwidthEstimate",
    "ColumnSchema",
    "DEFAULT_SCHEMA",
    "FitSpec",
    "FittedCurve",
    "GAUSSIAN_KERNEL",
    "KernelConstants",
    "LocMatrix",
    "LocRefinement",
    "LocValue",
    "LossKind",
    "NormalizedSample",
    "PairedSample",
    "ParseError",
    "PsiFunction",
    "Ranks",
    "RawScores",
    "SmoothingError",
    "StepFunction",
    "SummaryStats",
    "TiesError",
    "check_loss_objective",
    "distribution",
    "dpi_bandwidth",
    "empirical_ranks",
    "finite_population_I",
    "fit_curve",
    "histogram",
    "increasing_rearrangement",
    "jitter",
    "liebscher_zeta",
    "load_csv",
    "local_linear_fit",
    "loc_index",
    "loc_matrix",
    "loc_refined",
    "median_adjust",
    "normalize",
    "oversmoothed_bandwidth",
    "pair",
    "pearson",
    "psi_norm_constant",
    "rank_step_function",
    "spearman",
    "step_from_curve",
    "summarize",
    "yu_jones_factor",
]
