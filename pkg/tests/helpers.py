"""Shared construction helpers for the test suite."""

from __future__ import annotations

import random
from dataclasses import replace

import numpy as np

from testalloc.domain import Area, CandidateSite, Region
from testalloc.gp_design import KernelSpec, kernel_covariance


def mk_area(aid, x, y, pop, counts=None):
    return Area(id=aid, centroid=(float(x), float(y)), population=pop,
                stratum_counts=counts or {})


def mk_region(areas, axes=()):
    return Region(areas=tuple(areas), stratum_axes=tuple(axes))


def line_region(pops, spacing=1.0, start=0.0):
    """Areas on the x axis with the given populations."""
    return mk_region([mk_area(f"a{j}", start + j * spacing, 0.0, p)
                      for j, p in enumerate(pops)])


def mk_site(sid, x, y, capacity=1120.0, site_type=1):
    return CandidateSite(id=sid, location=(float(x), float(y)),
                         capacity=float(capacity), site_type=site_type)


def two_group_region():
    """Two areas, two fully separated strata, equal populations.

    Covering exactly one area gives conditional probabilities 1 and 0
    against a marginal of 0.5, so the equity score is 0.25 + 0.25 = 0.5.
    """
    a0 = mk_area("a0", 0.0, 0.0, 100, {("A",): 100})
    a1 = mk_area("a1", 2.0, 0.0, 100, {("B",): 100})
    return mk_region([a0, a1], axes=(("group", ("A", "B")),))


def random_region(rng: random.Random, m: int, coord_scale: float = 10.0,
                  pop_range=(0, 2000)):
    areas = [
        mk_area(f"a{j:03d}", rng.uniform(0, coord_scale), rng.uniform(0, coord_scale),
                rng.randint(*pop_range))
        for j in range(m)
    ]
    return mk_region(areas)


def random_sites(rng: random.Random, n: int, coord_scale: float = 10.0,
                 cap_range=(200.0, 3000.0)):
    return [mk_site(f"s{i:03d}", rng.uniform(0, coord_scale), rng.uniform(0, coord_scale),
                    capacity=rng.uniform(*cap_range)) for i in range(n)]


def random_locations(rng: random.Random, n: int, scale: float = 5.0):
    return [(rng.uniform(0, scale), rng.uniform(0, scale)) for _ in range(n)]


def fd_covariance_jacobians(locations, spec: KernelSpec, rel_step: float = 1e-6):
    """Central finite differences of the covariance in each parameter.

    Independent oracle for the analytic Jacobians: only evaluates the
    covariance itself.
    """
    out = []
    for name in ("sigma2", "phi", "tau2"):
        theta_j = getattr(spec, name)
        h = rel_step * theta_j if theta_j > 0 else rel_step
        plus = kernel_covariance(locations, replace(spec, **{name: theta_j + h}))
        minus = kernel_covariance(locations, replace(spec, **{name: theta_j - h}))
        out.append((plus - minus) / (2.0 * h))
    return out


def rel_frobenius(a, b):
    denom = np.linalg.norm(b)
    if denom == 0:
        return np.linalg.norm(a - b)
    return np.linalg.norm(a - b) / denom


def sorted_area_order(region, site):
    """Area indices by (distance to site, area id): the prefix ordering."""
    import math
    def key(j):
        a = region.areas[j]
        d = math.hypot(a.centroid[0] - site.location[0], a.centroid[1] - site.location[1])
        return (d, a.id)
    return sorted(range(region.m), key=key)
