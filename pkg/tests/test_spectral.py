import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_state
from nematic2d.errors import GridMismatch
from nematic2d.initial import random_band_limited
from nematic2d.spectral import (Grid, State, check_xi_identities, curl3, divergence, gradient,
                                helmholtz_forward, helmholtz_inverse, integrate, laplacian,
                                leray_project, max_divergence, norms, relative_residual,
                                same_grid, sq_norm, sym_skew)


def _rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


@pytest.mark.parametrize("n", [7, 12, 4, 0])
def test_grid_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        Grid(n)


def test_grid_rejects_nonpositive_length():
    with pytest.raises(ValueError):
        Grid(16, 0.0)


def test_shape_mismatch_raises(grid32):
    with pytest.raises(GridMismatch):
        laplacian(np.zeros((16, 16)), grid32)
    with pytest.raises(GridMismatch):
        same_grid(random_state(32), random_state(16))


def test_constant_director_has_no_curl_or_divergence(grid32):
    d = np.ones((3, 32, 32)) * np.array([0.6, 0.0, 0.8])[:, None, None]
    assert np.abs(curl3(d, grid32)).max() == 0
    assert np.abs(divergence(d[:2], grid32)).max() == 0


def test_twist_profile_derivatives(grid32):
    x, _ = grid32.coords
    d = np.stack([np.cos(x), np.sin(x), np.zeros_like(x)])
    assert np.allclose(divergence(d[:2], grid32), -np.sin(x), atol=1e-13)
    c = curl3(d, grid32)
    assert np.allclose(c[:2], 0, atol=1e-13)
    assert np.allclose(c[2], np.cos(x), atol=1e-13)


@pytest.mark.parametrize("length", [2 * math.pi, 1.0, 7.5])
def test_laplacian_of_single_mode(length):
    grid = Grid(32, length)
    x, _ = grid.coords
    k = 2 * math.pi / length
    f = np.sin(k * x)
    assert _rel(laplacian(f, grid), -k ** 2 * f) <= 1e-12


def test_derivatives_commute(grid32):
    f = random_band_limited(grid32, 1, 5, np.random.default_rng(0))[0]
    gx_y = gradient(gradient(f, grid32)[0], grid32)[1]
    gy_x = gradient(gradient(f, grid32)[1], grid32)[0]
    assert _rel(gx_y, gy_x) <= 1e-12
    lap_grad = gradient(laplacian(f, grid32), grid32)
    grad_lap = laplacian(gradient(f, grid32), grid32)
    assert _rel(lap_grad, grad_lap) <= 1e-12
    assert _rel(divergence(gradient(f, grid32), grid32), laplacian(f, grid32)) <= 1e-12


def test_leray_fixed_point_and_kernel(grid32):
    x, y = grid32.coords
    v = np.stack([np.sin(y), np.cos(x)])
    assert np.abs(leray_project(v, grid32) - v).max() <= 1e-12
    phi = np.sin(x + 2 * y) + np.cos(3 * x)
    assert np.abs(leray_project(gradient(phi, grid32), grid32)).max() <= 1e-12


@given(st.integers(0, 10_000))
def test_leray_projection_properties(seed):
    grid = Grid(16)
    rng = np.random.default_rng(seed)
    v = random_band_limited(grid, 2, 5, rng)
    p = leray_project(v, grid)
    scale = np.abs(v).max() / grid.spacing
    assert max_divergence(p, grid) <= 1e-12 * scale
    assert np.abs(leray_project(p, grid) - p).max() <= 1e-12
    grad = gradient(random_band_limited(grid, 1, 5, rng)[0], grid)
    inner = integrate(np.sum(p * grad, axis=0), grid)
    assert abs(inner) <= 1e-10 * math.sqrt(sq_norm(p, grid) * sq_norm(grad, grid))
    total = sq_norm(v, grid)
    assert sq_norm(p, grid) + sq_norm(v - p, grid) == pytest.approx(total, rel=1e-10)


def test_helmholtz_single_mode(grid32):
    _, y = grid32.coords
    u = np.stack([np.sin(y), np.zeros_like(y)])
    xi = helmholtz_inverse(u, grid32)
    assert np.abs(xi[0] - np.sin(y) / 2).max() <= 1e-14
    assert np.abs(xi[1]).max() <= 1e-14
    assert np.all(helmholtz_inverse(np.zeros_like(u), grid32) == 0)


@given(st.integers(0, 10_000))
def test_helmholtz_round_trip_and_contraction(seed):
    grid = Grid(16)
    u = random_band_limited(grid, 2, 6, np.random.default_rng(seed))
    xi = helmholtz_inverse(u, grid)
    assert _rel(helmholtz_forward(xi, grid), u) <= 1e-12
    assert sq_norm(xi, grid) <= sq_norm(u, grid)
    w = leray_project(u, grid)
    assert max_divergence(helmholtz_inverse(w, grid), grid) <= 1e-13


def test_helmholtz_keeps_mean(grid32):
    u = np.ones((2, 32, 32))
    assert np.allclose(helmholtz_inverse(u, grid32), 1.0)


def test_sym_skew_examples():
    g = np.array([[0.0, 1.0], [0.0, 0.0]])
    A, Om = sym_skew(g)
    assert np.array_equal(A, [[0, 0.5], [0.5, 0]])
    assert np.array_equal(Om, [[0, 0.5], [-0.5, 0]])
    s = np.array([[1.0, 2.0], [2.0, 3.0]])
    assert np.array_equal(sym_skew(s)[1], np.zeros((2, 2)))


def test_trace_of_A_vanishes_for_solenoidal_u(state32):
    A, Om = sym_skew(gradient(state32.u, state32.grid))
    assert np.abs(A[0, 0] + A[1, 1]).max() <= 1e-10
    assert np.abs(A + Om - gradient(state32.u, state32.grid)).max() <= 1e-15


def test_norm_examples():
    grid = Grid(32)
    x, _ = grid.coords
    assert norms(np.ones((32, 32)), grid)["l2"] ** 2 == pytest.approx((2 * math.pi) ** 2, rel=1e-14)
    assert norms(np.sin(x), grid)["l2"] ** 2 == pytest.approx((2 * math.pi) ** 2 / 2, rel=1e-12)
    r = norms(np.sin(x), grid)
    assert r["linf"] == pytest.approx(1.0, abs=1e-2)
    assert r["h1"] ** 2 == pytest.approx(2 * (2 * math.pi) ** 2 / 2, rel=1e-12)


@given(st.integers(0, 10_000))
def test_ladyzhenskaya_ratio_is_moderate(seed):
    grid = Grid(16)
    f = random_band_limited(grid, 1, 5, np.random.default_rng(seed))[0]
    r = norms(f, grid)
    assert r["l4"] ** 2 <= 2.0 * r["l2"] * r["h1"]


def test_xi_identities_zero_and_single_mode(grid32):
    x, y = grid32.coords
    assert check_xi_identities(np.zeros((2, 32, 32)), grid32).worst == 0
    u = np.stack([np.sin(y) + np.cos(2 * y), np.sin(3 * x)])
    assert check_xi_identities(u, grid32).worst <= 1e-12


@given(st.integers(0, 10_000))
def test_xi_identities_random(seed):
    grid = Grid(16)
    u = leray_project(random_band_limited(grid, 2, 5, np.random.default_rng(seed)), grid)
    assert check_xi_identities(u, grid).worst <= 1e-10


def test_relative_residual_conventions():
    assert relative_residual(np.zeros(3), np.zeros(3)) == 0.0
    assert relative_residual(np.ones(3), -np.ones(3)) == 1.0


def test_state_copy_is_independent(state32):
    c = state32.copy()
    c.u[0, 0, 0] += 1
    assert c.u[0, 0, 0] != state32.u[0, 0, 0]


def test_state_shape_checks(grid32):
    with pytest.raises(GridMismatch):
        State(np.zeros((3, 32, 32)), np.zeros((3, 32, 32)), 0.0, grid32)
