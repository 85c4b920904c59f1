"""Core data model shared by every other module.

Regions hold demand areas (census-tract analogues) with populations and
sociodemographic stratum counts; candidate sites are potential test-center
locations with weekly testing capacity. All coordinates are planar,
in kilometers (ingest performs the lon/lat projection), so distance math
downstream is plain Euclidean.

Every value here is immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

# A full stratum-label combination, one label per axis, e.g. ("black", "female").
StratumKey = tuple[str, ...]

# Weights outside this magnitude window get a warning (never a rejection).
WEIGHT_RANGE = (1e-8, 1e6)


@dataclass(frozen=True)
class Area:
    """One demand unit: identifier, planar-km centroid, population, strata."""

    id: str
    centroid: tuple[float, float]
    population: int
    stratum_counts: dict[StratumKey, int] = field(default_factory=dict)


@dataclass(frozen=True)
class Region:
    """An ordered collection of areas plus the declared stratum axes.

    ``stratum_axes`` is a tuple of ``(axis_name, levels)`` pairs; stratum
    counts on areas are keyed by full cross-product combinations in axis
    order. Axes may be empty when equity scoring is not needed.
    """

    areas: tuple[Area, ...]
    stratum_axes: tuple[tuple[str, tuple[str, ...]], ...] = ()

    @property
    def m(self) -> int:
        return len(self.areas)

    def total_population(self) -> int:
        return sum(a.population for a in self.areas)

    def populations(self) -> list[int]:
        return [a.population for a in self.areas]

    def centroids(self) -> list[tuple[float, float]]:
        return [a.centroid for a in self.areas]

    def stratum_combos(self) -> list[StratumKey]:
        """All cross-product combinations of the declared axis levels."""
        if not self.stratum_axes:
            return []
        return [tuple(c) for c in itertools.product(*(levels for _, levels in self.stratum_axes))]

    def bounding_box_diagonal(self) -> float:
        xs = [a.centroid[0] for a in self.areas]
        ys = [a.centroid[1] for a in self.areas]
        if not xs:
            return 0.0
        return math.hypot(max(xs) - min(xs), max(ys) - min(ys))


@dataclass(frozen=True)
class CandidateSite:
    """A potential test-center location with weekly testing capacity."""

    id: str
    location: tuple[float, float]
    capacity: float = 1120.0
    site_type: int = 1


@dataclass(frozen=True)
class Allocation:
    """A selected set of candidate-site indices under a budget of k sites."""

    selected: frozenset[int]
    budget: int

    @classmethod
    def of(cls, indices: Iterable[int], budget: int | None = None) -> "Allocation":
        sel = frozenset(int(i) for i in indices)
        return cls(selected=sel, budget=len(sel) if budget is None else budget)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.selected))

    @property
    def size(self) -> int:
        return len(self.selected)


@dataclass(frozen=True)
class Weights:
    """Scalarization weights for the combined objective."""

    lambda1: float = 1e-2  # coverage
    lambda2: float = 0.0   # design uncertainty (skipped entirely when zero)
    lambda3: float = 1.0   # equity

    def __post_init__(self) -> None:
        for name in ("lambda1", "lambda2", "lambda3"):
            v = getattr(self, name)
            if not (v >= 0.0) or not math.isfinite(v):
                raise ValueError(f"{name} must be a finite nonnegative real, got {v!r}")

    def range_warnings(self) -> list[str]:
        """Warn (never reject) for weights outside the recommended magnitudes.

        An exact zero disables its criterion and is not flagged.
        """
        lo, hi = WEIGHT_RANGE
        out = []
        for name in ("lambda1", "lambda2", "lambda3"):
            v = getattr(self, name)
            if v != 0.0 and not (lo <= v <= hi):
                out.append(f"{name}={v:g} is outside the recommended range [{lo:g}, {hi:g}]")
        return out


@dataclass(frozen=True)
class ScoreTriple:
    """The three criterion scores for one allocation.

    ``d_optimality`` is None when its weight was zero and the (expensive)
    criterion was skipped.
    """

    coverage: int
    d_optimality: float | None
    equity: float


@dataclass(frozen=True)
class Violation:
    where: str
    reason: str

    def __str__(self) -> str:
        return f"{self.where}: {self.reason}"


def _finite_pair(p: tuple[float, float]) -> bool:
    return len(p) == 2 and all(isinstance(v, (int, float)) and math.isfinite(v) for v in p)


def validate_region(region: Region) -> list[Violation]:
    """Return every invariant violation in the region (empty list when valid).

    Violations are data, not faults: the region is never modified and the
    same region always yields the same report.
    """
    out: list[Violation] = []
    if region.m < 1:
        out.append(Violation("region", "no areas"))

    seen: set[str] = set()
    for a in region.areas:
        if a.id in seen:
            out.append(Violation(a.id, "duplicate id"))
        seen.add(a.id)

    axis_names: set[str] = set()
    for name, levels in region.stratum_axes:
        if not name:
            out.append(Violation("axes", "empty axis name"))
        if name in axis_names:
            out.append(Violation("axes", f"duplicate axis name {name!r}"))
        axis_names.add(name)
        if len(levels) < 1:
            out.append(Violation("axes", f"axis {name!r} has no levels"))
        if len(set(levels)) != len(levels):
            out.append(Violation("axes", f"axis {name!r} has duplicate levels"))

    valid_combos = set(region.stratum_combos())
    n_axes = len(region.stratum_axes)
    for a in region.areas:
        if not isinstance(a.population, int) or a.population < 0:
            out.append(Violation(a.id, f"population must be a nonnegative integer, got {a.population!r}"))
        if not _finite_pair(a.centroid):
            out.append(Violation(a.id, f"centroid must be a finite (x, y) pair, got {a.centroid!r}"))
        bad_key = False
        for key, count in a.stratum_counts.items():
            if not isinstance(count, int) or count < 0:
                out.append(Violation(a.id, f"stratum count for {key!r} must be a nonnegative integer"))
            if n_axes == 0:
                bad_key = True
            elif len(key) != n_axes or key not in valid_combos:
                out.append(Violation(a.id, f"unknown stratum combination {key!r}"))
        if bad_key:
            out.append(Violation(a.id, "stratum counts present but no stratum axes declared"))
        if n_axes > 0:
            total = sum(a.stratum_counts.values())
            if total != a.population:
                out.append(Violation(
                    a.id, f"stratum sum mismatch: counts total {total}, population {a.population}"))
    return out


def require_valid(region: Region) -> Region:
    """Raise ValueError listing all violations unless the region is valid."""
    violations = validate_region(region)
    if violations:
        detail = "; ".join(str(v) for v in violations[:20])
        more = "" if len(violations) <= 20 else f" (+{len(violations) - 20} more)"
        raise ValueError(f"invalid region: {detail}{more}")
    return region


def stratum_count_vector(region: Region, combo: StratumKey) -> list[int]:
    """Per-area counts for one stratum combination (missing entries are 0)."""
    return [a.stratum_counts.get(combo, 0) for a in region.areas]
