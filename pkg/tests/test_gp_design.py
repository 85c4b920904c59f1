import itertools
import math
import random
from dataclasses import replace

import numpy as np
import pytest

from testalloc.domain import Allocation
from testalloc.ga_core import GaParams
from testalloc.gp_design import (
    KernelSpec,
    ThetaGrid,
    covariance_jacobian,
    default_theta_grid,
    evaluate_design,
    fisher_information,
    kernel_covariance,
    local_optimal_design,
    compute_local_designs,
    minimax_score,
    uncertainty_from_fisher,
    v0,
)
from helpers import (
    fd_covariance_jacobians,
    line_region,
    mk_site,
    random_locations,
    rel_frobenius,
)

SPEC = KernelSpec(sigma2=1.0, phi=1.0, tau2=0.2)


def line_sites(n, spacing=1.0):
    return [mk_site(f"s{i}", i * spacing, 0.0) for i in range(n)]


# ---------------------------------------------------------------- covariance

def test_single_location_diagonal():
    s = kernel_covariance([(0.0, 0.0)], KernelSpec(sigma2=2.0, phi=1.0, tau2=0.5))
    assert s.shape == (1, 1)
    assert s[0, 0] == pytest.approx(2.5, abs=1e-15)


def test_duplicate_locations_without_nugget_rejected():
    spec = KernelSpec(sigma2=1.0, phi=1.0, tau2=0.0)
    with pytest.raises(ValueError, match="singular covariance"):
        kernel_covariance([(1.0, 1.0), (1.0, 1.0)], spec)
    # a positive nugget keeps the matrix full rank
    ok = kernel_covariance([(1.0, 1.0), (1.0, 1.0)], replace(spec, tau2=0.3))
    assert np.linalg.matrix_rank(ok) == 2


def test_exponential_off_diagonal_value():
    spec = KernelSpec(sigma2=1.0, phi=1.0, tau2=0.0)
    s = kernel_covariance([(0.0, 0.0), (1.0, 0.0)], spec)
    assert s[0, 1] == pytest.approx(math.exp(-1.0), rel=1e-12)
    assert s[0, 0] == pytest.approx(1.0)
    assert (s == s.T).all()


def test_squared_exponential_off_diagonal_value():
    spec = KernelSpec(sigma2=3.0, phi=2.0, tau2=0.0, family="squared_exponential")
    s = kernel_covariance([(0.0, 0.0), (1.0, 0.0)], spec)
    assert s[0, 1] == pytest.approx(3.0 * math.exp(-0.25), rel=1e-12)


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        KernelSpec(sigma2=0.0, phi=1.0, tau2=0.1)
    with pytest.raises(ValueError):
        KernelSpec(sigma2=1.0, phi=-1.0, tau2=0.1)
    with pytest.raises(ValueError):
        KernelSpec(sigma2=1.0, phi=1.0, tau2=-0.1)
    with pytest.raises(ValueError):
        KernelSpec(sigma2=1.0, phi=1.0, tau2=0.1, family="matern")


# ----------------------------------------------------------------- jacobians

def test_nugget_jacobian_is_identity():
    jac = covariance_jacobian([(0, 0), (1, 1), (2, 0)], SPEC)
    assert np.array_equal(jac[2], np.eye(3))


def test_sigma2_jacobian_diagonal_is_one():
    jac = covariance_jacobian([(0, 0), (3, 4)], SPEC)
    assert np.allclose(np.diag(jac[0]), 1.0)


@pytest.mark.parametrize("family", ["exponential", "squared_exponential"])
def test_jacobians_match_finite_differences(family):
    rng = random.Random(1234)
    worst = 0.0
    for _ in range(100):
        locs = random_locations(rng, 5)
        spec = KernelSpec(
            sigma2=rng.uniform(0.3, 3.0),
            phi=rng.uniform(0.3, 4.0),
            tau2=rng.uniform(0.05, 1.0),
            family=family,
        )
        analytic = covariance_jacobian(locs, spec)
        numeric = fd_covariance_jacobians(locs, spec)
        for a, n in zip(analytic, numeric):
            worst = max(worst, rel_frobenius(a, n))
    assert worst <= 1e-5


# ---------------------------------------------------------- fisher information

def test_white_noise_closed_form():
    for n in range(1, 11):
        for theta in (0.5, 1.0, 4.0):
            f = fisher_information(theta * np.eye(n), [np.eye(n)])
            expected = n / (2.0 * theta ** 2)
            assert abs(f[0, 0] - expected) <= 1e-12 * expected
            assert uncertainty_from_fisher(f) == pytest.approx(-math.log(expected), rel=1e-12)


def test_scalar_nugget_information():
    # 1 point, parameter tau2 only: F = 1/2 (sigma2 + tau2)^-2
    sigma2, tau2 = 1.5, 0.5
    f = fisher_information(np.array([[sigma2 + tau2]]), [np.eye(1)])
    assert f[0, 0] == pytest.approx(0.5 * (sigma2 + tau2) ** -2, rel=1e-12)


def test_fisher_matches_monte_carlo_score_covariance():
    """Independent oracle: F equals the covariance of the analytic score.

    Draw y ~ N(0, Sigma); the score in theta_j is
    -1/2 tr(Sigma^-1 J_j) + 1/2 y' Sigma^-1 J_j Sigma^-1 y, and its
    covariance matrix is the Fisher information. Checked to three standard
    errors of the Monte-Carlo estimate.
    """
    rng = np.random.default_rng(2024)
    locs = [(0.0, 0.0), (1.2, 0.3), (0.4, 2.0), (2.5, 1.7), (3.1, 0.2), (1.8, 2.9)]
    spec = KernelSpec(sigma2=1.3, phi=1.7, tau2=0.4)
    sigma = kernel_covariance(locs, spec)
    jac = covariance_jacobian(locs, spec)
    f = fisher_information(sigma, jac)

    n = len(locs)
    chol = np.linalg.cholesky(sigma)
    n_samples = 100_000
    y = chol @ rng.standard_normal((n, n_samples))
    sigma_inv = np.linalg.inv(sigma)
    scores = np.empty((3, n_samples))
    for j, jmat in enumerate(jac):
        a = sigma_inv @ jmat @ sigma_inv
        quad = np.einsum("is,ij,js->s", y, a, y)
        scores[j] = -0.5 * np.trace(sigma_inv @ jmat) + 0.5 * quad

    centered = scores - scores.mean(axis=1, keepdims=True)
    sample_cov = centered @ centered.T / (n_samples - 1)
    for j in range(3):
        for k in range(3):
            prods = centered[j] * centered[k]
            se = prods.std(ddof=1) / math.sqrt(n_samples)
            assert abs(sample_cov[j, k] - f[j, k]) <= 3.0 * se, (j, k)


def test_fisher_rejects_ill_conditioned():
    sigma = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-15]])
    with pytest.raises(ValueError, match="ill-conditioned"):
        fisher_information(sigma, [np.eye(2)])


def test_fisher_positive_semidefinite_on_random_instances():
    rng = random.Random(7)
    for _ in range(50):
        locs = random_locations(rng, rng.randint(2, 7))
        spec = KernelSpec(sigma2=rng.uniform(0.3, 3.0), phi=rng.uniform(0.3, 4.0),
                          tau2=rng.uniform(0.05, 1.0))
        f = fisher_information(kernel_covariance(locs, spec),
                               covariance_jacobian(locs, spec))
        assert np.allclose(f, f.T)
        bound = -1e-9 * np.linalg.norm(f)
        assert np.linalg.eigvalsh(f).min() >= bound


# ------------------------------------------------------------------------ v0

def test_v0_cross_checked_against_eigenvalue_determinant():
    region = line_region([10] * 8)
    sites = line_sites(8, spacing=1.5)
    alloc = Allocation.of([0, 2, 4, 5, 7], budget=5)
    got = v0(region, alloc, sites, SPEC)
    locs = [sites[i].location for i in alloc.indices]
    f = fisher_information(kernel_covariance(locs, SPEC), covariance_jacobian(locs, SPEC))
    expected = -float(np.sum(np.log(np.linalg.eigvalsh(f))))
    assert abs(got - expected) <= 1e-8 * abs(expected)


def test_single_point_design_is_unidentifiable():
    region = line_region([10] * 3)
    sites = line_sites(3)
    assert v0(region, Allocation.of([1], budget=1), sites, SPEC) == math.inf


def test_v0_invariant_under_site_relabeling():
    region = line_region([10] * 6)
    sites = line_sites(6, spacing=0.8)
    a = v0(region, Allocation.of([0, 3, 5], budget=3), sites, SPEC)
    b = v0(region, Allocation.of([5, 0, 3], budget=3), sites, SPEC)
    assert a == b


# ---------------------------------------------------------------- local design

def test_full_allocation_is_unique_design():
    region = line_region([10] * 4)
    sites = line_sites(4)
    ld = local_optimal_design(region, sites, k=4, spec=SPEC)
    assert ld.allocation.indices == (0, 1, 2, 3)
    assert ld.v0 == v0(region, ld.allocation, sites, SPEC)


def test_exhaustive_design_is_true_minimum():
    region = line_region([10] * 7)
    sites = line_sites(7, spacing=0.9)
    ld = local_optimal_design(region, sites, k=3, spec=SPEC, method="exhaustive")
    values = {
        subset: v0(region, Allocation.of(subset, budget=3), sites, SPEC)
        for subset in itertools.combinations(range(7), 3)
    }
    assert ld.v0 == min(values.values())
    assert values[ld.allocation.indices] == ld.v0


def test_all_singular_search_space_is_an_error():
    # one point can never identify three covariance parameters
    region = line_region([10] * 4)
    sites = line_sites(4)
    with pytest.raises(ValueError, match="no identifiable design"):
        local_optimal_design(region, sites, k=1, spec=SPEC, method="exhaustive")


def test_ga_design_matches_exhaustive_on_seeds():
    region = line_region([10] * 8)
    sites = line_sites(8, spacing=1.0)
    exact = local_optimal_design(region, sites, k=3, spec=SPEC, method="exhaustive")
    hits = 0
    for seed in range(20):
        ga = local_optimal_design(
            region, sites, k=3, spec=SPEC, method="ga",
            search_budget=GaParams(population_size=30, generations=40, seed=seed))
        assert ga.v0 >= exact.v0 - 1e-12
        if abs(ga.v0 - exact.v0) <= 1e-12:
            hits += 1
    assert hits >= 19


# -------------------------------------------------------------------- minimax

def _small_grid(region):
    return ThetaGrid(points=(
        KernelSpec(sigma2=0.8, phi=1.0, tau2=0.3),
        KernelSpec(sigma2=1.5, phi=2.5, tau2=0.1),
        KernelSpec(sigma2=1.0, phi=4.0, tau2=0.6),
    ))


def test_local_optimum_has_zero_regret_on_single_point_grid():
    region = line_region([10] * 7)
    sites = line_sites(7)
    grid = ThetaGrid(points=(SPEC,))
    locals_ = compute_local_designs(region, sites, 3, grid, method="exhaustive")
    f2 = minimax_score(region, sites, locals_[0].allocation, grid, locals_)
    assert abs(f2) <= 1e-9


def test_regret_nonnegative_for_any_allocation():
    region = line_region([10] * 7)
    sites = line_sites(7)
    grid = ThetaGrid(points=(SPEC,))
    locals_ = compute_local_designs(region, sites, 3, grid, method="exhaustive")
    for subset in itertools.combinations(range(7), 3):
        f2 = minimax_score(region, sites, Allocation.of(subset, budget=3), grid, locals_)
        assert f2 >= -1e-9


def test_minimax_equals_recomputed_regrets_on_three_point_grid():
    region = line_region([10] * 6)
    sites = line_sites(6, spacing=1.2)
    grid = _small_grid(region)
    locals_ = compute_local_designs(region, sites, 3, grid, method="exhaustive")
    alloc = Allocation.of([0, 2, 5], budget=3)
    f2 = minimax_score(region, sites, alloc, grid, locals_)
    # independent recomputation, one grid point at a time
    regrets = []
    for spec, ld in zip(grid.points, locals_):
        regrets.append(v0(region, alloc, sites, spec) - ld.v0)
    assert f2 == max(regrets)
    result = evaluate_design(region, sites, alloc, grid, locals_)
    assert result.regret == f2
    assert len(result.v0_by_theta) == 3


def test_unidentifiable_allocation_scores_infinite():
    region = line_region([10] * 5)
    sites = line_sites(5)
    grid = ThetaGrid(points=(SPEC,))
    locals_ = compute_local_designs(region, sites, 2, grid, method="exhaustive")
    # a single selected site cannot identify three parameters
    f2 = minimax_score(region, sites, Allocation.of([1], budget=2), grid, locals_)
    assert f2 == math.inf


def test_default_grid_is_eight_point_product():
    region = line_region([10] * 5, spacing=2.0)
    grid = default_theta_grid(region)
    assert len(grid) == 8
    diag = region.bounding_box_diagonal()
    phis = {p.phi for p in grid.points}
    assert phis == {0.25 * diag, 1.0 * diag}
    assert {p.sigma2 for p in grid.points} == {0.5, 2.0}
    assert {p.tau2 for p in grid.points} == {0.1, 1.0}
