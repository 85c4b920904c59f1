"""Seed-deterministic genetic algorithm over fixed-size index subsets.

Chromosomes are ordered tuples of k gene slots, each holding a site index;
a total repair step replaces duplicate genes with the nearest unused index,
so every individual ever evaluated is a feasible k-subset. Fitness is
maximized. Tournament selection (size 3), uniform crossover, per-slot
resampling mutation, elitism.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Sequence

TOURNAMENT_SIZE = 3


@dataclass(frozen=True)
class GaParams:
    population_size: int = 60
    generations: int = 200
    crossover_rate: float = 0.8
    mutation_rate: float = 0.1
    elitism: int = 2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population_size < 1:
            raise ValueError("population_size must be positive")
        if self.generations < 0:
            raise ValueError("generations must be nonnegative")
        if not (0.0 <= self.crossover_rate <= 1.0):
            raise ValueError("crossover_rate must be in [0, 1]")
        if not (0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("mutation_rate must be in [0, 1]")
        if not (0 <= self.elitism < self.population_size):
            raise ValueError("elitism must be nonnegative and smaller than population_size")


@dataclass
class EvolveResult:
    selected: tuple[int, ...]
    value: float
    history: list[float]
    evaluations: int


def repair(genes: Sequence[int], n: int) -> tuple[int, ...]:
    """Replace duplicate genes with the nearest unused index.

    Scan order is fixed: slots left to right; for a duplicate value g the
    candidates are tried by ascending distance |c - g|, smaller index first
    on ties. Total for k <= n, so the result is always a k-subset of 0..n-1.
    """
    used: set[int] = set()
    out: list[int] = []
    for g in genes:
        g = int(g) % n
        if g not in used:
            used.add(g)
            out.append(g)
            continue
        placed = False
        for d in range(1, n):
            for c in (g - d, g + d):
                if 0 <= c < n and c not in used:
                    used.add(c)
                    out.append(c)
                    placed = True
                    break
            if placed:
                break
        if not placed:  # k > n would be the only way here; guarded by caller
            raise ValueError("cannot repair: more genes than distinct indices")
    return tuple(out)


def evolve_subsets(
    n: int,
    k: int,
    fitness: Callable[[tuple[int, ...]], float],
    params: GaParams,
    on_generation: Callable[[int, float], bool] | None = None,
) -> EvolveResult:
    """Maximize ``fitness`` over k-subsets of range(n).

    ``fitness`` receives the canonical sorted index tuple and may return
    -inf for designs it cannot score. Evaluations are cached by subset, so
    the returned count is the number of distinct subsets actually scored.
    ``on_generation(gen, best_so_far)`` may return True to stop early.
    Deterministic given ``params.seed``.
    """
    if not (0 <= k <= n):
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    rng = random.Random(params.seed)

    cache: dict[tuple[int, ...], float] = {}
    evaluations = 0

    def score(individual: tuple[int, ...]) -> float:
        nonlocal evaluations
        key = tuple(sorted(individual))
        if key not in cache:
            v = fitness(key)
            if isinstance(v, float) and math.isnan(v):
                v = -math.inf
            cache[key] = float(v)
            evaluations += 1
        return cache[key]

    if k == 0:
        v = score(())
        return EvolveResult(selected=(), value=v, history=[v], evaluations=evaluations)

    population: list[tuple[int, ...]] = [
        tuple(rng.sample(range(n), k)) for _ in range(params.population_size)
    ]
    scored = sorted(((score(ind), ind) for ind in population),
                    key=lambda t: (-t[0], tuple(sorted(t[1]))))
    best_value, best_ind = scored[0][0], tuple(sorted(scored[0][1]))
    history = [best_value]

    for gen in range(1, params.generations + 1):
        if on_generation is not None and on_generation(gen - 1, best_value):
            break
        next_pop: list[tuple[int, ...]] = [ind for _, ind in scored[:params.elitism]]

        def pick() -> tuple[int, ...]:
            contenders = [scored[rng.randrange(len(scored))] for _ in range(TOURNAMENT_SIZE)]
            return max(contenders, key=lambda t: t[0])[1]

        while len(next_pop) < params.population_size:
            p1, p2 = list(pick()), list(pick())
            if rng.random() < params.crossover_rate:
                for slot in range(k):
                    if rng.random() < 0.5:
                        p1[slot], p2[slot] = p2[slot], p1[slot]
            for child in (p1, p2):
                if len(next_pop) >= params.population_size:
                    break
                for slot in range(k):
                    if rng.random() < params.mutation_rate:
                        child[slot] = rng.randrange(n)
                next_pop.append(repair(child, n))

        population = next_pop
        scored = sorted(((score(ind), ind) for ind in population),
                        key=lambda t: (-t[0], tuple(sorted(t[1]))))
        if scored[0][0] > best_value:
            best_value = scored[0][0]
            best_ind = tuple(sorted(scored[0][1]))
        history.append(best_value)

    return EvolveResult(selected=best_ind, value=best_value,
                        history=history, evaluations=evaluations)
