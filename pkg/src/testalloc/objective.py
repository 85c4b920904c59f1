"""The combined scalar objective lambda1*f1 - lambda2*f2 - lambda3*f3."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .coverage import CoverageStack, build_coverage_stack, coverage_score, covered_indicators
from .domain import Allocation, CandidateSite, Region, ScoreTriple, Weights
from .equity import EquityBreakdown, equity_score
from .gp_design import LocalDesign, ThetaGrid, compute_local_designs, minimax_score

BUDGET_MODES = ("exact", "at_most")


@dataclass(frozen=True)
class ProblemInstance:
    """Everything one allocation problem needs: region, sites, precomputed
    coverage stack, optional theta grid, weights, and the budget."""

    region: Region
    sites: tuple[CandidateSite, ...]
    stack: CoverageStack
    weights: Weights
    budget: int
    target_fraction: float
    grid: ThetaGrid | None = None
    budget_mode: str = "exact"

    def __post_init__(self) -> None:
        if self.budget_mode not in BUDGET_MODES:
            raise ValueError(f"budget_mode must be one of {BUDGET_MODES}")
        if not (0 <= self.budget <= len(self.sites)):
            raise ValueError(f"budget k={self.budget} must be within 0..n={len(self.sites)}")
        if self.weights.lambda2 > 0 and self.grid is None:
            raise ValueError("a theta grid is required when lambda2 > 0")

    @property
    def n(self) -> int:
        return len(self.sites)

    @classmethod
    def build(
        cls,
        region: Region,
        sites: Sequence[CandidateSite],
        weights: Weights,
        budget: int,
        target_fraction: float,
        grid: ThetaGrid | None = None,
        budget_mode: str = "exact",
    ) -> "ProblemInstance":
        sites = tuple(sites)
        stack = build_coverage_stack(region, list(sites), target_fraction)
        return cls(region=region, sites=sites, stack=stack, weights=weights,
                   budget=budget, target_fraction=target_fraction, grid=grid,
                   budget_mode=budget_mode)

    def local_designs(self, seed: int = 0, threads: int = 1) -> list[LocalDesign] | None:
        """Warm the S(theta) cache for minimax scoring; None when f2 is disabled.

        Computed once per (grid, candidates, budget) and then shared,
        read-only, by every fitness evaluation of a solve.
        """
        if self.weights.lambda2 == 0 or self.grid is None:
            return None
        return compute_local_designs(self.region, self.sites, self.budget, self.grid,
                                     seed=seed, threads=threads)


def is_feasible(instance: ProblemInstance, allocation: Allocation) -> bool:
    """Exactly k distinct valid site indices (at most k in at_most mode)."""
    if any(not (0 <= i < instance.n) for i in allocation.selected):
        return False
    if instance.budget_mode == "at_most":
        return allocation.size <= instance.budget
    return allocation.size == instance.budget


def combined_value(weights: Weights, coverage: float, d_optimality: float | None,
                   equity: float) -> float:
    """Scalarize the three criteria. A skipped f2 requires a zero lambda2."""
    if d_optimality is None:
        if weights.lambda2 != 0:
            raise ValueError("f2 was not computed but lambda2 is nonzero")
        f2_term = 0.0
    else:
        f2_term = weights.lambda2 * d_optimality
    return weights.lambda1 * coverage - f2_term - weights.lambda3 * equity


def evaluate(
    instance: ProblemInstance,
    allocation: Allocation,
    locals_: Sequence[LocalDesign] | None = None,
) -> tuple[ScoreTriple, float]:
    """Score one feasible allocation: (f1, f2, f3) and the combined value.

    f2 (the dominant cost) is skipped entirely when lambda2 is zero and
    reported as None. When lambda2 > 0 and no locals cache is supplied, one
    is computed on the spot; callers evaluating many allocations should pass
    ``instance.local_designs()`` instead.
    """
    if not is_feasible(instance, allocation):
        raise ValueError(
            f"budget violation: allocation selects {allocation.size} of n={instance.n} "
            f"sites, budget k={instance.budget} ({instance.budget_mode})")

    e = covered_indicators(instance.stack, allocation)
    f1 = coverage_score(e)

    if instance.weights.lambda2 == 0:
        f2: float | None = None
    else:
        assert instance.grid is not None
        if locals_ is None:
            locals_ = compute_local_designs(instance.region, instance.sites,
                                            instance.budget, instance.grid)
        f2 = minimax_score(instance.region, instance.sites, allocation,
                           instance.grid, locals_)

    f3 = equity_score(instance.region, e).total
    triple = ScoreTriple(coverage=f1, d_optimality=f2, equity=f3)
    return triple, combined_value(instance.weights, f1, f2, f3)


def equity_breakdown(instance: ProblemInstance, allocation: Allocation) -> EquityBreakdown:
    """Per-stratum conditional probabilities for reports and the console."""
    e = covered_indicators(instance.stack, allocation)
    return equity_score(instance.region, e)
