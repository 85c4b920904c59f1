"""Capacity-aware coverage: the binary site-by-area matrix and the f1 score.

Each site covers a distance-ascending prefix of areas, cut off where the
accumulated demand (a target fraction of each covered area's population)
would exceed the site's weekly capacity. An area is covered by an allocation
when at least one selected site of any type reaches it; f1 counts covered
areas.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import Allocation, CandidateSite, Region


@dataclass(frozen=True)
class CoverageMatrix:
    """Binary coverage rows for the sites of one type.

    ``a[i, j] = 1`` when site i's capacity prefix reaches area j. ``tp`` is
    each site's total coverable raw population, capacity / target_fraction.
    ``site_indices`` maps rows back to positions in the global site list.
    """

    a: np.ndarray
    site_type: int
    tp: np.ndarray
    target_fraction: float
    weights_w: np.ndarray
    site_indices: tuple[int, ...]

    @property
    def n_sites(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.a.shape[1]


@dataclass(frozen=True)
class CoverageStack:
    """One CoverageMatrix per site type, all over the same area ordering."""

    matrices: tuple[CoverageMatrix, ...]

    @property
    def m(self) -> int:
        return self.matrices[0].m if self.matrices else 0

    def site_index_set(self) -> frozenset[int]:
        out: set[int] = set()
        for mat in self.matrices:
            out.update(mat.site_indices)
        return frozenset(out)


def _site_prefix_row(
    capacity: float,
    target_fraction: float,
    order: np.ndarray,
    weighted_pops: np.ndarray,
) -> np.ndarray:
    """Mark the longest distance-ascending prefix whose demand fits capacity.

    Demand is accumulated as raw weighted population and multiplied by the
    target fraction once per comparison, so integer populations never lose
    precision to per-area rounding.
    """
    row = np.zeros(len(order), dtype=np.uint8)
    cum = 0.0
    for j in order:
        cum += weighted_pops[j]
        if target_fraction * cum <= capacity:
            row[j] = 1
        else:
            break
    return row


def build_coverage_matrix(
    region: Region,
    sites: list[CandidateSite],
    target_fraction: float,
    weights_w: np.ndarray | None = None,
    site_indices: tuple[int, ...] | None = None,
) -> CoverageMatrix:
    """Build the coverage matrix for sites that all share one type.

    For each site, areas are sorted by Euclidean centroid distance (ties
    broken by area id, ascending) and marked covered along that order while
    the cumulative demand ``w * target_fraction * population`` stays within
    the site's capacity. Zero-population areas consume no demand and are
    covered whenever the prefix reaches them.
    """
    if region.m < 1:
        raise ValueError("no areas")
    if not (0.0 < target_fraction <= 1.0):
        raise ValueError(f"invalid fraction: target_fraction must be in (0, 1], got {target_fraction}")
    if not sites:
        raise ValueError("no sites")
    types = {s.site_type for s in sites}
    if len(types) != 1:
        raise ValueError(f"sites must share one site_type, got {sorted(types)}")

    m = region.m
    if weights_w is None:
        weights_w = np.ones(m)
    weights_w = np.asarray(weights_w, dtype=float)
    if weights_w.shape != (m,):
        raise ValueError(f"weights_w must have length {m}")

    if site_indices is None:
        site_indices = tuple(range(len(sites)))

    centroids = np.asarray(region.centroids(), dtype=float)
    pops = np.asarray(region.populations(), dtype=float)
    weighted_pops = weights_w * pops
    area_ids = [a.id for a in region.areas]
    # Stable argsort over (distance, area id): sort indices by id first, then
    # stably by distance, so equal distances fall back to ascending id.
    id_order = sorted(range(m), key=lambda j: area_ids[j])

    rows = []
    for site in sites:
        d = np.hypot(centroids[:, 0] - site.location[0], centroids[:, 1] - site.location[1])
        order = sorted(id_order, key=lambda j: d[j])
        rows.append(_site_prefix_row(site.capacity, target_fraction, np.asarray(order), weighted_pops))

    return CoverageMatrix(
        a=np.vstack(rows),
        site_type=sites[0].site_type,
        tp=np.asarray([s.capacity / target_fraction for s in sites]),
        target_fraction=target_fraction,
        weights_w=weights_w,
        site_indices=site_indices,
    )


def build_coverage_stack(
    region: Region,
    sites: list[CandidateSite],
    target_fraction: float,
    weights_w: np.ndarray | None = None,
) -> CoverageStack:
    """Group sites by type and build one coverage matrix per type.

    Row-to-site bookkeeping uses positions in the given (global) site list,
    which is what Allocation indices refer to.
    """
    if not sites:
        raise ValueError("no sites")
    by_type: dict[int, list[int]] = {}
    for idx, s in enumerate(sites):
        by_type.setdefault(s.site_type, []).append(idx)
    matrices = []
    for t in sorted(by_type):
        idxs = by_type[t]
        matrices.append(build_coverage_matrix(
            region,
            [sites[i] for i in idxs],
            target_fraction,
            weights_w=weights_w,
            site_indices=tuple(idxs),
        ))
    return CoverageStack(matrices=tuple(matrices))


def covered_indicators(stack: CoverageStack, allocation: Allocation) -> np.ndarray:
    """Binary e vector: e[j] = 1 iff any selected site of any type covers j.

    e is the constraint-maximal feasible indicator, which the maximization
    direction of the objective always drives to its upper bound.
    """
    known = stack.site_index_set()
    bad = allocation.selected - known
    if bad:
        raise IndexError(f"site index out of range: {sorted(bad)}")
    e = np.zeros(stack.m, dtype=np.uint8)
    for mat in stack.matrices:
        rows = [r for r, gi in enumerate(mat.site_indices) if gi in allocation.selected]
        if rows:
            e |= mat.a[rows].max(axis=0)
    return e


def coverage_score(e: np.ndarray) -> int:
    """f1: the number of covered areas, sum of the binary e vector."""
    e = np.asarray(e)
    if e.size and not np.isin(e, (0, 1)).all():
        raise ValueError("e must be binary")
    return int(e.sum())
