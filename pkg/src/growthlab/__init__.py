"""growthlab: a sequential portfolio-selection laboratory.

Synthetic discrete markets with latent side-information dependence,
exact and learning-based sequential portfolio strategies, and a
diagnostics harness for growth-rate convergence experiments.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DimensionMismatch,
    EmptyDistribution,
    GrowthLabError,
    HistoryTooShort,
    InvalidProbability,
    MissingTransitionRow,
    NonPositiveInput,
    NotApplicable,
    NotConverged,
    PathMismatch,
    ShapeMismatch,
)
from .market import (
    AssetReturns,
    JointOutcome,
    MarketPath,
    MarketSpec,
    SideInfo,
    build_iid,
    build_markov,
    build_mixture,
    conditional_next,
    sample_path,
    spec_from_json,
    spec_to_json,
    stationary_atom_marginal,
    stationary_distribution,
)
from .logopt import (
    EPS_INTERIOR,
    EmpiricalDistribution,
    NormalizedReturns,
    Portfolio,
    expected_log_return,
    growth_decomposition_check,
    kt_residuals,
    normalize,
    solve_log_optimal,
    uniform_portfolio,
)
from .strategies import (
    KernelMatchSet,
    KernelParams,
    StrategyState,
    build_strategy,
    constant_strategy,
    empirical_log_optimal,
    kernel_match,
    kernel_strategy,
    oracle_log_optimal,
    oracle_mode_constant,
    order_mixture,
    universal_cover,
)
from .analytics import (
    AMGMMargins,
    ComparisonSeries,
    KTReport,
    WealthLedger,
    am_gm_margins,
    growth_diff,
    kt_certificate,
    normalization_identity_report,
    run_strategy,
    supermartingale_estimate,
)
