"""Effective sample size of Bayesian priors by p-value concordance."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .core import (
    ConcordanceProfile,
    EssEstimate,
    Family,
    HypothesisSpec,
    Method,
    SupportDirection,
    analytic_minimizer,
    default_grid,
    distance,
    estimate_ess,
    minimize_distance,
    signed_ess,
)
from .exceptions import (
    AllDrawsDegenerate,
    ColumnMissing,
    DegenerateDesign,
    DegenerateVariance,
    EnumerationCapExceeded,
    EssError,
    MinimizerAtBoundary,
    UnknownScenario,
    UnsupportedFamily,
    ValidationError,
)
from .montecarlo import RunConfig, EstimateSeries, run_replicated, run_replicated_sweep
from .estimators import PValueESS, exact_estimate, mc_estimate

__all__ = [
    "AllDrawsDegenerate",
    "ColumnMissing",
    "ConcordanceProfile",
    "DegenerateDesign",
    "DegenerateVariance",
    "EnumerationCapExceeded",
    "EssError",
    "EssEstimate",
    "EstimateSeries",
    "Family",
    "HypothesisSpec",
    "Method",
    "MinimizerAtBoundary",
    "PValueESS",
    "RunConfig",
    "SupportDirection",
    "UnknownScenario",
    "UnsupportedFamily",
    "ValidationError",
    "analytic_minimizer",
    "default_grid",
    "distance",
    "estimate_ess",
    "exact_estimate",
    "mc_estimate",
    "minimize_distance",
    "run_replicated",
    "run_replicated_sweep",
    "signed_ess",
]
