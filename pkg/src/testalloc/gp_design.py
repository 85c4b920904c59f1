"""Design-uncertainty criterion for the spatial Gaussian-process model.

The allocation is scored by how well the selected site locations pin down
the covariance parameters theta = (sigma2, phi, tau2): the Fisher
information of a zero-mean Gaussian field is

    F[j, k] = 1/2 tr( Sigma^-1 dSigma/dtheta_j Sigma^-1 dSigma/dtheta_k )

and the uncertainty of a design Z at parameters theta is
V0(Z, theta) = -log det F. Because theta is unknown up front, designs are
scored by minimax regret over a finite parameter grid: the worst-case gap
between the design's V0 and the V0 of the locally optimal design at that
grid point. That regret is the f2 fed to the combined objective.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domain import Allocation, CandidateSite, Region
from .ga_core import GaParams, evolve_subsets

log = logging.getLogger(__name__)

FAMILIES = ("exponential", "squared_exponential")
PARAM_NAMES = ("sigma2", "phi", "tau2")

# Above this many k-subsets, local optimal designs fall back to the GA.
EXHAUSTIVE_DESIGN_LIMIT = 100_000

# Covariance matrices with a worse condition estimate are treated as singular.
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class KernelSpec:
    """Covariance family and parameters (marginal variance, range km, nugget)."""

    sigma2: float
    phi: float
    tau2: float
    family: str = "exponential"

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}, expected one of {FAMILIES}")
        if not (self.sigma2 > 0.0):
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        if not (self.phi > 0.0):
            raise ValueError(f"phi must be positive, got {self.phi}")
        if not (self.tau2 >= 0.0):
            raise ValueError(f"tau2 must be nonnegative, got {self.tau2}")

    @property
    def theta(self) -> tuple[float, float, float]:
        return (self.sigma2, self.phi, self.tau2)


@dataclass(frozen=True)
class ThetaGrid:
    """Finite set of parameter vectors the minimax criterion ranges over."""

    points: tuple[KernelSpec, ...]

    def __post_init__(self) -> None:
        if len(self.points) < 1:
            raise ValueError("theta grid must contain at least one point")

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class LocalDesign:
    """The locally optimal design at one grid point, with its V0 value."""

    spec: KernelSpec
    allocation: Allocation
    v0: float


@dataclass(frozen=True)
class DesignResult:
    allocation: Allocation
    v0_by_theta: tuple[float, ...]
    regret: float


def default_theta_grid(region: Region, family: str = "exponential") -> ThetaGrid:
    """Small product grid scaled to the region: sigma2 x range x nugget.

    Range levels are fractions of the region's bounding-box diagonal so the
    grid adapts to region size; a degenerate (single-point) region falls back
    to 1 km.
    """
    diag = region.bounding_box_diagonal()
    if diag <= 0.0:
        diag = 1.0
    points = [
        KernelSpec(sigma2=s2, phi=phi, tau2=t2, family=family)
        for s2 in (0.5, 2.0)
        for phi in (0.25 * diag, 1.0 * diag)
        for t2 in (0.1, 1.0)
    ]
    return ThetaGrid(points=tuple(points))


def _pairwise_distances(locations: np.ndarray) -> np.ndarray:
    dx = locations[:, 0:1] - locations[:, 0:1].T
    dy = locations[:, 1:2] - locations[:, 1:2].T
    return np.hypot(dx, dy)


def _as_locations(locations: Sequence[tuple[float, float]]) -> np.ndarray:
    arr = np.asarray(locations, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
        raise ValueError("locations must be a nonempty list of (x, y) pairs")
    return arr


def kernel_covariance(locations: Sequence[tuple[float, float]], spec: KernelSpec) -> np.ndarray:
    """Covariance matrix sigma2 * rho(h / phi) + tau2 * I over the locations.

    rho is exp(-u) for the exponential family and exp(-u^2) for the squared
    exponential. Coincident locations with a zero nugget would make the
    matrix rank-deficient and are rejected.
    """
    arr = _as_locations(locations)
    h = _pairwise_distances(arr)
    n = len(arr)
    if spec.tau2 == 0.0 and n > 1:
        off = h + np.diag(np.full(n, np.inf))
        if off.min() == 0.0:
            raise ValueError("singular covariance: duplicate locations with zero nugget")
    u = h / spec.phi
    rho = np.exp(-u) if spec.family == "exponential" else np.exp(-(u ** 2))
    return spec.sigma2 * rho + spec.tau2 * np.eye(n)


def covariance_jacobian(
    locations: Sequence[tuple[float, float]], spec: KernelSpec
) -> list[np.ndarray]:
    """Analytic partials of the covariance, in parameter order (sigma2, phi, tau2)."""
    arr = _as_locations(locations)
    h = _pairwise_distances(arr)
    n = len(arr)
    u = h / spec.phi
    if spec.family == "exponential":
        rho = np.exp(-u)
        d_phi = spec.sigma2 * (h / spec.phi ** 2) * rho
    else:
        rho = np.exp(-(u ** 2))
        d_phi = spec.sigma2 * (2.0 * h ** 2 / spec.phi ** 3) * rho
    return [rho, d_phi, np.eye(n)]


def fisher_information(sigma: np.ndarray, jacobians: Sequence[np.ndarray]) -> np.ndarray:
    """F[j, k] = 1/2 tr(Sigma^-1 J_j Sigma^-1 J_k), symmetric p x p."""
    sigma = np.asarray(sigma, dtype=float)
    if np.linalg.cond(sigma) > CONDITION_LIMIT:
        raise ValueError("ill-conditioned covariance")
    ms = [np.linalg.solve(sigma, np.asarray(j, dtype=float)) for j in jacobians]
    p = len(ms)
    f = np.empty((p, p))
    for j in range(p):
        for k in range(j, p):
            f[j, k] = f[k, j] = 0.5 * np.sum(ms[j] * ms[k].T)
    return f


def uncertainty_from_fisher(f: np.ndarray) -> float:
    """-log det of the Fisher matrix; +inf when F is singular or not PD.

    Cholesky first, eigenvalue product as the fallback near singularity.
    """
    try:
        chol = np.linalg.cholesky(f)
        diag = np.diag(chol)
        if (diag <= 0.0).any():
            return math.inf
        return float(-2.0 * np.sum(np.log(diag)))
    except np.linalg.LinAlgError:
        eig = np.linalg.eigvalsh(f)
        if (eig <= 0.0).any():
            return math.inf
        return float(-np.sum(np.log(eig)))


def design_v0(locations: Sequence[tuple[float, float]], spec: KernelSpec) -> float:
    """V0 = -log det F for the design at the given locations.

    Unidentifiable designs (singular covariance or Fisher matrix) return the
    +inf sentinel rather than raising, so metaheuristic search can traverse
    them; the event is logged at debug level.
    """
    try:
        sigma = kernel_covariance(locations, spec)
        jac = covariance_jacobian(locations, spec)
        f = fisher_information(sigma, jac)
    except ValueError as exc:
        log.debug("design scored as unidentifiable: %s", exc)
        return math.inf
    return uncertainty_from_fisher(f)


def v0(
    region: Region,
    allocation: Allocation,
    sites: Sequence[CandidateSite],
    spec: KernelSpec,
) -> float:
    """V0 of an allocation: the design points are the selected sites' coordinates."""
    locs = [sites[i].location for i in allocation.indices]
    if not locs:
        return math.inf
    return design_v0(locs, spec)


def local_optimal_design(
    region: Region,
    candidates: Sequence[CandidateSite],
    k: int,
    spec: KernelSpec,
    search_budget: GaParams | None = None,
    method: str = "auto",
    seed: int = 0,
) -> LocalDesign:
    """S(theta): the k-subset of candidates minimizing V0 at the given theta.

    Exhaustive enumeration when the subset count is small enough (ties broken
    toward the lexicographically smallest index set), otherwise the genetic
    search with fitness -V0. ``method`` forces one route ("exhaustive"/"ga").
    """
    n = len(candidates)
    if not (0 < k <= n):
        raise ValueError(f"need 0 < k <= n, got k={k}, n={n}")
    if method not in ("auto", "exhaustive", "ga"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "exhaustive" if math.comb(n, k) <= EXHAUSTIVE_DESIGN_LIMIT else "ga"

    locs = [c.location for c in candidates]

    def value(subset: tuple[int, ...]) -> float:
        return design_v0([locs[i] for i in subset], spec)

    if method == "exhaustive":
        best_subset: tuple[int, ...] | None = None
        best_v = math.inf
        for subset in itertools.combinations(range(n), k):
            v = value(subset)
            if v < best_v:
                best_v, best_subset = v, subset
        if best_subset is None or math.isinf(best_v):
            raise ValueError("no identifiable design")
        return LocalDesign(spec=spec, allocation=Allocation.of(best_subset, budget=k), v0=best_v)

    params = search_budget if search_budget is not None else GaParams(seed=seed)
    res = evolve_subsets(n, k, lambda s: -value(s), params)
    if math.isinf(res.value):
        raise ValueError("no identifiable design")
    return LocalDesign(spec=spec, allocation=Allocation.of(res.selected, budget=k), v0=-res.value)


def compute_local_designs(
    region: Region,
    candidates: Sequence[CandidateSite],
    k: int,
    grid: ThetaGrid,
    search_budget: GaParams | None = None,
    method: str = "auto",
    seed: int = 0,
    threads: int = 1,
) -> list[LocalDesign]:
    """Local optimal designs for every grid point, in grid order.

    This is the cache the minimax criterion reuses across all fitness
    evaluations of one solve; grid points are independent and may be
    computed in parallel.
    """
    def one(spec: KernelSpec) -> LocalDesign:
        return local_optimal_design(region, candidates, k, spec,
                                    search_budget=search_budget, method=method, seed=seed)

    if threads > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, grid.points))
    return [one(spec) for spec in grid.points]


def evaluate_design(
    region: Region,
    candidates: Sequence[CandidateSite],
    allocation: Allocation,
    grid: ThetaGrid,
    locals_: Sequence[LocalDesign],
) -> DesignResult:
    """V0 at every grid point plus the worst-case regret against the locals."""
    if len(locals_) != len(grid):
        raise ValueError("locals cache does not match the theta grid")
    v0s = tuple(v0(region, allocation, candidates, spec) for spec in grid.points)
    regret = max(v - ld.v0 for v, ld in zip(v0s, locals_))
    return DesignResult(allocation=allocation, v0_by_theta=v0s, regret=regret)


def minimax_score(
    region: Region,
    candidates: Sequence[CandidateSite],
    allocation: Allocation,
    grid: ThetaGrid,
    locals_: Sequence[LocalDesign],
) -> float:
    """f2: max over the grid of V0(Z, theta) - V0(S(theta), theta).

    +inf when the allocation is unidentifiable at any grid point. Never
    meaningfully negative when the locals were computed exhaustively.
    """
    return evaluate_design(region, candidates, allocation, grid, locals_).regret
