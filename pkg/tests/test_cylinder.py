import math

import numpy as np
import pytest

from cknlab.cylinder import GridMismatch, combine, model_for, scale
from cknlab.energy import rho02_h1_norm_sq
from cknlab.extremals import psi_norms


def test_lp1_norm_matches_closed_form(params_case2):
    model = model_for(params_case2)
    closed = psi_norms(params_case2)
    assert model.lp1_pow(model.psi_function()) == pytest.approx(closed.lp1_pow, rel=1e-8)
    assert model.lp1_norm(model.psi_function()) == pytest.approx(closed.lp1, rel=1e-8)


def test_h1_orthogonality_of_soft_modes(params_case2):
    model = model_for(params_case2)
    psif = model.psi_function()
    psip = model.psi_prime_function()
    bound = 1e-10 * math.sqrt(model.h1_inner(psif, psif) * model.h1_inner(psip, psip))
    assert abs(model.h1_inner(psif, psip)) < bound


def test_mode_one_norm_reflection_invariance(params_remaining):
    model = model_for(params_remaining)
    v = model.rho10_function()
    reflected = scale(v, -1.0)  # polar-angle reflection negates the degree-one harmonic
    assert model.lp1_pow(reflected) == pytest.approx(model.lp1_pow(v), rel=1e-14)
    mixed = combine([1.0, 0.3], [model.psi_function(), v])
    mixed_reflected = combine([1.0, -0.3], [model.psi_function(), v])
    assert model.lp1_pow(mixed_reflected) == pytest.approx(model.lp1_pow(mixed), rel=1e-12)


def test_h1_norm_of_rho02_matches_closed_form(params_case2):
    model = model_for(params_case2)
    rho = model.rho02_function()
    assert model.h1_inner(rho, rho) == pytest.approx(rho02_h1_norm_sq(params_case2), rel=1e-10)


def test_distance_of_bubble_is_zero(params_case2):
    model = model_for(params_case2)
    projection = model.distance_to_manifold(model.psi_function())
    assert projection.distance_sq < 1e-8 * model.energy_psi
    assert abs(projection.shift) < 1e-6
    assert projection.scalar == pytest.approx(1.0, rel=1e-10)


def test_distance_of_scaled_shifted_bubble(params_case2):
    model = model_for(params_case2)
    v = model.psi_function(shift=2.0, scalar=3.0)
    projection = model.distance_to_manifold(v)
    assert projection.distance_sq < 1e-8 * model.h1_inner(v, v)
    assert projection.shift == pytest.approx(2.0, abs=1e-6)
    assert projection.scalar == pytest.approx(3.0, rel=1e-9)
    assert not projection.edge_attained


def test_distance_of_gap_perturbation(params_case2):
    model = model_for(params_case2)
    rho = model.rho02_function()
    norm_sq = model.h1_inner(rho, rho)
    eps = 1e-3
    v = combine([1.0, eps], [model.psi_function(), rho])
    projection = model.distance_to_manifold(v)
    assert projection.distance_sq == pytest.approx(eps * eps * norm_sq, rel=1e-2)


def test_distance_shift_invariance(params_case2):
    model = model_for(params_case2)
    rho = model.rho02_function()
    v = combine([1.0, 0.05], [model.psi_function(), rho])
    base = model.distance_to_manifold(v).distance_sq
    k = 40  # integer grid shifts keep the profile exactly representable
    shifted = model.function({0: np.roll(v.mode(0), k)})
    moved = model.distance_to_manifold(shifted)
    assert moved.distance_sq == pytest.approx(base, rel=1e-9)
    assert moved.shift == pytest.approx(k * model.h, abs=1e-6)


def test_overlap_function_peak_and_parity(params_case2):
    model = model_for(params_case2)
    psif = model.psi_function()
    center = model.overlap(psif, 0.0)
    assert center == pytest.approx(model.lp1_pow_psi, rel=1e-12)
    for s in (0.5, 1.5, 4.0):
        assert model.overlap(psif, s) == pytest.approx(model.overlap(psif, -s), rel=1e-12)
        assert model.overlap(psif, s) < center


def test_two_bubble_overlap_maximizer_tracks_bubble(params_p3):
    model = model_for(params_p3)
    g = params_p3.gamma
    s0 = 8.0 / g
    v = model.two_bubble(s0)
    projection = model.distance_to_manifold(v)
    bound = 10.0 * math.exp(-g * s0 / (params_p3.p - 1.0))
    assert min(abs(projection.shift), abs(projection.shift - s0)) < bound
    assert not projection.edge_attained


def test_cauchy_schwarz(params_case2, rng):
    model = model_for(params_case2)
    for _ in range(10):
        u = model.random_mperp(int(rng.integers(1 << 31)), 1.0)
        v = model.random_mperp(int(rng.integers(1 << 31)), 2.0)
        lhs = model.h1_inner(u, v) ** 2
        rhs = model.h1_inner(u, u) * model.h1_inner(v, v)
        assert lhs <= rhs * (1.0 + 1e-12)


def test_mperp_projection(params_case2):
    model = model_for(params_case2)
    psif = model.psi_function()
    projected = model.project_mperp(psif)
    assert model.h1_inner(projected, projected) < 1e-20 * model.energy_psi

    rho = model.rho02_function()
    kept = model.project_mperp(rho)
    diff = combine([1.0, -1.0], [kept, rho])
    assert model.h1_inner(diff, diff) < 1e-16 * model.h1_inner(rho, rho)

    noise = model.random_mperp(5, 1.0)
    once = model.project_mperp(noise)
    twice = model.project_mperp(once)
    diff2 = combine([1.0, -1.0], [once, twice])
    assert model.h1_inner(diff2, diff2) < 1e-24 * model.h1_inner(once, once)
    for reference in (psif, model.psi_prime_function()):
        bound = 1e-10 * math.sqrt(
            model.h1_inner(once, once) * model.h1_inner(reference, reference)
        )
        assert abs(model.h1_inner(once, reference)) < bound


def test_grid_mismatch_rejected(params_case2, params_remaining):
    model2 = model_for(params_case2)
    model3 = model_for(params_remaining)
    with pytest.raises(GridMismatch):
        model2.h1_inner(model2.psi_function(), model3.psi_function())
    with pytest.raises(GridMismatch):
        combine([1.0, 1.0], [model2.psi_function(), model3.psi_function()])


def test_supremum_attained_interior(params_case2, rng):
    model = model_for(params_case2)
    for _ in range(5):
        noise = model.random_mperp(int(rng.integers(1 << 31)), 0.3)
        v = combine([1.0, 1.0], [model.psi_function(), noise])
        projection = model.distance_to_manifold(v)
        assert not projection.edge_attained
        assert projection.distance_sq >= 0.0
