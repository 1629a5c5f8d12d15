"""First-order moving average models for irregularly spaced time series.

The package covers the full workflow: exact simulation on arbitrary grids,
one-step prediction with per-step error variances, maximum likelihood and
residual-bootstrap estimation, residual diagnostics, and a reproducible
Monte Carlo study harness with a command line front end.
"""

__version__ = "0.1.0"

from .bootstrap import (
    BootstrapResult,
    bootstrap_estimate,
    bootstrap_resample,
    standardized_residuals,
)
from .core import (
    THETA_MAX,
    ImaParams,
    InnovationDist,
    TimeGrid,
    TimeSeries,
    autocovariance,
    c_sequence,
    covariance_matrix,
    gap_sequence,
    regular_grid,
    sample_gaps_exp_mixture,
    sample_gaps_shifted_exp,
    simulate,
)
from .diagnostics import (
    DiagnosticsReport,
    acf,
    chi_square_sf,
    diagnostics_report,
    ljung_box,
    mse_comparison,
    qq_normal,
)
from .errors import (
    BootstrapUnstable,
    CsvParseError,
    DegenerateData,
    ImaError,
    InsufficientData,
    InvalidGap,
    InvalidInput,
    InvalidParameter,
    InvalidTimes,
    McUnstable,
    NotPositiveDefinite,
    NumericalFailure,
    SeUnavailable,
)
from .estimate import (
    FitResult,
    asymptotic_se_regular,
    fit_mle,
    log_likelihood,
    minimize_bounded,
    observed_information_se,
    reduced_likelihood,
)
from .mc import (
    GapModel,
    McConfig,
    McReport,
    parse_study_config,
    performance_measures,
    run_mc_bootstrap,
    run_mc_mle,
    run_scenario,
    run_study,
)
from .predict import (
    PredictionOutput,
    direct_predict_oracle,
    innovations_algorithm_general,
    innovations_predict,
    residual_expansion,
    state_space_filter,
)
from .rng import child_seed, stream

__all__ = [
    "THETA_MAX",
    "__version__",
    "acf",
    "asymptotic_se_regular",
    "autocovariance",
    "bootstrap_estimate",
    "bootstrap_resample",
    "BootstrapResult",
    "BootstrapUnstable",
    "c_sequence",
    "chi_square_sf",
    "child_seed",
    "covariance_matrix",
    "CsvParseError",
    "DegenerateData",
    "diagnostics_report",
    "DiagnosticsReport",
    "direct_predict_oracle",
    "fit_mle",
    "FitResult",
    "gap_sequence",
    "GapModel",
    "ImaError",
    "ImaParams",
    "InnovationDist",
    "innovations_algorithm_general",
    "innovations_predict",
    "InsufficientData",
    "InvalidGap",
    "InvalidInput",
    "InvalidParameter",
    "InvalidTimes",
    "ljung_box",
    "log_likelihood",
    "McConfig",
    "McReport",
    "McUnstable",
    "minimize_bounded",
    "mse_comparison",
    "NotPositiveDefinite",
    "NumericalFailure",
    "observed_information_se",
    "parse_study_config",
    "performance_measures",
    "PredictionOutput",
    "qq_normal",
    "reduced_likelihood",
    "regular_grid",
    "residual_expansion",
    "run_mc_bootstrap",
    "run_mc_mle",
    "run_scenario",
    "run_study",
    "sample_gaps_exp_mixture",
    "sample_gaps_shifted_exp",
    "SeUnavailable",
    "simulate",
    "standardized_residuals",
    "state_space_filter",
    "stream",
    "TimeGrid",
    "TimeSeries",
]
