"""Test-center allocation balancing coverage, design uncertainty, and equity."""

from .coverage import (
    CoverageMatrix,
    CoverageStack,
    build_coverage_matrix,
    build_coverage_stack,
    coverage_score,
    covered_indicators,
)
from .domain import (
    Allocation,
    Area,
    CandidateSite,
    Region,
    ScoreTriple,
    Violation,
    Weights,
    validate_region,
)
from .equity import EquityBreakdown, equity_score, marginal_coverage
from .ga_core import GaParams
from .gp_design import (
    DesignResult,
    KernelSpec,
    LocalDesign,
    ThetaGrid,
    covariance_jacobian,
    default_theta_grid,
    fisher_information,
    kernel_covariance,
    local_optimal_design,
    minimax_score,
    v0,
)
from .ingest import SynthParams, load_problem, load_region, load_sites, synth_region
from .objective import ProblemInstance, combined_value, evaluate, is_feasible
from .solver import SolveReport, compare_schemes, exhaustive_solve, ga_solve

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "Area",
    "CandidateSite",
    "CoverageMatrix",
    "CoverageStack",
    "DesignResult",
    "EquityBreakdown",
    "GaParams",
    "KernelSpec",
    "LocalDesign",
    "ProblemInstance",
    "Region",
    "ScoreTriple",
    "SolveReport",
    "SynthParams",
    "ThetaGrid",
    "Violation",
    "Weights",
    "build_coverage_matrix",
    "build_coverage_stack",
    "combined_value",
    "compare_schemes",
    "covariance_jacobian",
    "coverage_score",
    "covered_indicators",
    "default_theta_grid",
    "equity_score",
    "evaluate",
    "exhaustive_solve",
    "fisher_information",
    "ga_solve",
    "is_feasible",
    "kernel_covariance",
    "load_problem",
    "load_region",
    "load_sites",
    "local_optimal_design",
    "marginal_coverage",
    "minimax_score",
    "synth_region",
    "v0",
    "validate_region",
]
