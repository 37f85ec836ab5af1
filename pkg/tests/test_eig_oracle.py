import numpy as np
import pytest

from cknlab.eig_oracle import (
    ConvergenceFailure,
    GridSpec,
    generalized_eigenvalues,
    inertia_count,
    rayleigh_gap_check,
    solver_grid,
)
from cknlab.params import felli_schneider, make_params
from cknlab.spectrum import eigenvalue_closed, rho_02, rho_10_profile, spectral_gap
from tests.conftest import sample_valid_params


def test_mode_zero_reference_point(params_case2):
    p = params_case2.p
    exact = [1.0 / p, 1.0, (3.0 * p - 1.0) / (p + 1.0)]
    # reference resolution and a finer default-style grid
    for nodes in (6000, 8000):
        lams = generalized_eigenvalues(params_case2, 0, 3, GridSpec(120.0, nodes))
        for lam, ref in zip(lams, exact):
            assert lam == pytest.approx(ref, rel=1e-6)


def test_mode_one_near_degenerate_curve():
    b_fs = felli_schneider(3, -1.0)
    params = make_params(3, -1.0, b_fs + 1e-6)
    lam = generalized_eigenvalues(params, 1, 1)[0]
    assert lam == pytest.approx(1.0, abs=1e-4)


def test_grid_refinement_stability(params_case2):
    base = generalized_eigenvalues(params_case2, 0, 3, GridSpec(120.0, 8000))
    fine = generalized_eigenvalues(params_case2, 0, 3, GridSpec(120.0, 16000))
    for a, b in zip(base, fine):
        assert abs(a - b) < 1e-8


def test_closed_form_agreement_random_points(rng):
    for _ in range(5):
        params = sample_valid_params(rng, p_cap=6.0)
        for i in range(2):
            lams = generalized_eigenvalues(params, i, 2)
            for j, lam in enumerate(lams):
                assert lam == pytest.approx(eigenvalue_closed(params, i, j).lam, rel=1e-6)


def test_inertia_brackets_closed_form(params_case2):
    grid = solver_grid(params_case2)
    for i in range(2):
        for j in range(2):
            lam = eigenvalue_closed(params_case2, i, j).lam
            below = inertia_count(params_case2, i, lam - 1e-4, grid)
            above = inertia_count(params_case2, i, lam + 1e-4, grid)
            assert above - below == 1


def test_bracket_failure_is_reported(params_case2):
    with pytest.raises(ConvergenceFailure):
        generalized_eigenvalues(params_case2, 60, 6, GridSpec(60.0, 2000), extrapolate=False)


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    return abs(float(np.dot(u, v))) / (np.linalg.norm(u) * np.linalg.norm(v))


def test_rayleigh_gap_radial_region(params_case2):
    report = rayleigh_gap_check(params_case2)
    gap = spectral_gap(params_case2)
    assert report.value >= gap.lambda_star - 1e-3
    assert report.value == pytest.approx(gap.lambda_star, abs=1e-3)
    assert report.winner_mode == 0
    t = report.grid.t()
    reference = rho_02(params_case2, t)
    assert _cosine(report.minimizer, reference) > 0.999


def test_rayleigh_gap_degree_one_region(params_remaining):
    report = rayleigh_gap_check(params_remaining)
    gap = spectral_gap(params_remaining)
    assert report.value >= gap.lambda_star - 1e-3
    assert report.value == pytest.approx(gap.lambda_star, abs=1e-3)
    assert report.winner_mode == 1
    t = report.grid.t()
    reference = rho_10_profile(params_remaining, t)
    assert _cosine(report.minimizer, reference) > 0.999
