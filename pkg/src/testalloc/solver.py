"""Solvers for the combined allocation problem.

``exhaustive_solve`` enumerates every feasible subset and is the oracle the
genetic solver is validated against on small instances; ``ga_solve`` is the
production route. Both return the same SolveReport shape.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .domain import Allocation, ScoreTriple
from .ga_core import GaParams, evolve_subsets
from .gp_design import LocalDesign
from .objective import ProblemInstance, evaluate, is_feasible

# Exhaustive enumeration refuses instances with more subsets than this.
ORACLE_LIMIT = 1_000_000


@dataclass
class SolveReport:
    best: Allocation
    best_scores: ScoreTriple
    combined: float
    history: list[float]
    evaluations: int
    interrupted: bool = False


def _cardinalities(instance: ProblemInstance) -> list[int]:
    if instance.budget_mode == "at_most":
        return list(range(instance.budget + 1))
    return [instance.budget]


def exhaustive_solve(
    instance: ProblemInstance,
    locals_: Sequence[LocalDesign] | None = None,
) -> SolveReport:
    """Enumerate all feasible subsets, return the max-combined allocation.

    Ties break toward the lexicographically smallest index set (enumeration
    order plus strict improvement). Guarded: refuses instances with more
    than ORACLE_LIMIT subsets.
    """
    n = instance.n
    total = sum(math.comb(n, k) for k in _cardinalities(instance))
    if total > ORACLE_LIMIT:
        raise ValueError(
            f"instance too large for oracle: {total} subsets exceeds {ORACLE_LIMIT}")
    if locals_ is None and instance.weights.lambda2 > 0:
        locals_ = instance.local_designs()

    best: tuple[float, Allocation, ScoreTriple] | None = None
    evaluations = 0
    for k in _cardinalities(instance):
        for subset in itertools.combinations(range(n), k):
            alloc = Allocation.of(subset, budget=instance.budget)
            triple, combined = evaluate(instance, alloc, locals_)
            evaluations += 1
            if best is None or combined > best[0]:
                best = (combined, alloc, triple)
    assert best is not None
    return SolveReport(best=best[1], best_scores=best[2], combined=best[0],
                       history=[best[0]], evaluations=evaluations)


def ga_solve(
    instance: ProblemInstance,
    params: GaParams | None = None,
    locals_: Sequence[LocalDesign] | None = None,
    on_generation: Callable[[int, float], bool] | None = None,
) -> SolveReport:
    """Genetic search over k-subsets with the combined objective as fitness.

    Deterministic given ``params.seed``. In at_most budget mode every
    cardinality 0..k is searched with its own run and the best result wins.
    ``on_generation(gen, best_so_far)`` may return True to stop early; the
    report is then flagged interrupted.
    """
    params = params or GaParams()
    if locals_ is None and instance.weights.lambda2 > 0:
        locals_ = instance.local_designs(seed=params.seed)

    def run(k: int, seed: int) -> tuple[SolveReport, bool]:
        stopped = False

        def wrapped(gen: int, best: float) -> bool:
            nonlocal stopped
            if on_generation is not None and on_generation(gen, best):
                stopped = True
                return True
            return False

        def fitness(subset: tuple[int, ...]) -> float:
            alloc = Allocation.of(subset, budget=instance.budget)
            _, combined = evaluate(instance, alloc, locals_)
            return combined

        res = evolve_subsets(instance.n, k, fitness,
                             GaParams(population_size=params.population_size,
                                      generations=params.generations,
                                      crossover_rate=params.crossover_rate,
                                      mutation_rate=params.mutation_rate,
                                      elitism=params.elitism,
                                      seed=seed),
                             on_generation=wrapped)
        alloc = Allocation.of(res.selected, budget=instance.budget)
        triple, combined = evaluate(instance, alloc, locals_)
        return SolveReport(best=alloc, best_scores=triple, combined=combined,
                           history=res.history, evaluations=res.evaluations), stopped

    reports: list[SolveReport] = []
    interrupted = False
    for k in _cardinalities(instance):
        rep, stopped = run(k, params.seed + k - instance.budget)
        reports.append(rep)
        if stopped:
            interrupted = True
            break
    best = max(reports, key=lambda r: r.combined)
    best.evaluations = sum(r.evaluations for r in reports)
    best.interrupted = interrupted
    return best


def compare_schemes(
    instance: ProblemInstance,
    allocations: Mapping[str, Allocation],
    locals_: Sequence[LocalDesign] | None = None,
) -> list[dict]:
    """Score a set of named allocations side by side.

    Rows carry the scheme name, the three criterion scores, and the combined
    value. Infeasible allocations are flagged and left unscored; the other
    rows are still computed.
    """
    if locals_ is None and instance.weights.lambda2 > 0 and allocations:
        locals_ = instance.local_designs()
    rows: list[dict] = []
    for name, alloc in allocations.items():
        if not is_feasible(instance, alloc):
            rows.append({"name": name, "feasible": False, "coverage": None,
                         "d_optimality": None, "equity": None, "combined": None})
            continue
        triple, combined = evaluate(instance, alloc, locals_)
        rows.append({"name": name, "feasible": True, "coverage": triple.coverage,
                     "d_optimality": triple.d_optimality, "equity": triple.equity,
                     "combined": combined})
    return rows
