import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import (ANISO, LESLIE, ONE, admissible, random_admissible, random_state,
                      random_traceless_sym, random_unit)
from nematic2d.coeffs import FrankCoefficients, LeslieCoefficients, derive, mu_floor
from nematic2d.leslie import (check_leslie_equivalence, contraction_SigmaL, ddot, director_rhs,
                              frob, leslie_from_rate, leslie_stress_decomposed,
                              leslie_stress_original, quadratic_form_Q, remainder_terms,
                              sigma_main)
from nematic2d.spectral import gradient, sym_skew

SAMPLES = 10_000


def twist(grid):
    x, _ = grid.coords
    return np.stack([np.cos(x), np.sin(x), np.zeros_like(x)])


def test_Q_of_zero_strain():
    assert quadratic_form_Q(np.array([0.6, 0.8]), np.zeros((2, 2)), LESLIE) == 0


def test_Q_hand_example():
    leslie = LeslieCoefficients.from_mu(1, -1, 1, 1, 1, 1)
    A = np.array([[1.0, 0.0], [0.0, -1.0]])
    assert quadratic_form_Q(np.array([1.0, 0.0]), A, leslie) == pytest.approx(5.0)


@pytest.mark.parametrize("A, message", [
    (np.array([[0.0, 1.0], [0.0, 0.0]]), "NotSymmetric"),
    (np.array([[1.0, 0.0], [0.0, 1.0]]), "NotTraceFree"),
])
def test_Q_rejects_bad_tensors(A, message):
    with pytest.raises(ValueError, match=message):
        quadratic_form_Q(np.array([1.0, 0.0]), A, LESLIE)


@given(admissible, st.integers(0, 2 ** 32 - 1))
def test_Q_is_coercive(leslie, seed):
    rng = np.random.default_rng(seed)
    d = random_unit(rng, (200,))
    A = random_traceless_sym(rng, (200,))
    slack = quadratic_form_Q(d[:2], A, leslie) - mu_floor(leslie) * ddot(A, A)
    assert slack.min() >= -1e-12 * (1 + ddot(A, A).max())


def test_original_stress_trivial_cases(grid32):
    u = np.zeros((2, 32, 32))
    d = np.zeros((3, 32, 32))
    d[0] = 1.0
    assert np.all(leslie_stress_original(u, d, np.zeros_like(d), LESLIE, grid32) == 0)
    s = random_state(32, seed=1)
    newtonian = LeslieCoefficients(0, 0, 0, 1.5, 0, 0, -1.0, 0)
    A, _ = sym_skew(gradient(s.u, s.grid))
    sig = leslie_stress_original(s.u, s.d, np.ones_like(s.d), newtonian, s.grid)
    assert np.allclose(sig, 1.5 * A, rtol=0, atol=1e-14)


def test_original_stress_vanishes_on_twist(grid32):
    d = twist(grid32)
    sig = leslie_stress_original(np.zeros((2, 32, 32)), d, np.zeros_like(d), LESLIE, grid32)
    assert np.abs(sig).max() <= 1e-14


def test_rate_independence_without_mu2_mu3(state32):
    leslie = LeslieCoefficients(0.3, 0.0, 0.0, 1.0, 0.2, 0.4, -1.0, -0.2)
    a = leslie_stress_original(state32.u, state32.d, np.zeros_like(state32.d), leslie, state32.grid)
    b = leslie_stress_original(state32.u, state32.d, np.ones_like(state32.d), leslie, state32.grid)
    assert np.array_equal(a, b)


def test_perturbation_part_vanishes_for_one_constant(state32):
    forms = leslie_stress_decomposed(state32.u, state32.d, ONE, LESLIE, state32.grid)
    assert np.abs(forms.PiL).max() <= 1e-10


def test_constant_director_has_only_strain_part(grid32):
    s = random_state(32, seed=2)
    d = np.zeros_like(s.d)
    d[0], d[2] = 0.6, 0.8
    forms = leslie_stress_decomposed(s.u, d, ANISO, LESLIE, grid32)
    assert np.all(forms.B_part == 0) and np.all(forms.C_part == 0)
    assert np.allclose(forms.SigmaL, forms.A_part, rtol=0, atol=1e-15)


@pytest.mark.parametrize("seed", range(3))
def test_abc_split_is_exact(seed):
    s = random_state(32, seed=seed)
    forms = leslie_stress_decomposed(s.u, s.d, ANISO, LESLIE, s.grid)
    assert forms.abc_residual <= 1e-12


def test_equivalence_trivial(grid32):
    d = np.zeros((3, 32, 32))
    d[2] = 1.0
    assert check_leslie_equivalence(np.zeros((2, 32, 32)), d, ONE, LESLIE, grid32) == 0


@pytest.mark.parametrize("frank", [ONE, ANISO], ids=["one-constant", "anisotropic"])
@pytest.mark.parametrize("seed", range(3))
def test_equivalence_on_random_fields(frank, seed):
    s = random_state(64, seed=seed)
    assert check_leslie_equivalence(s.u, s.d, frank, LESLIE, s.grid) <= 1e-8


def test_contraction_trivial_cases():
    rng = np.random.default_rng(0)
    d = random_unit(rng, (100,))
    A = random_traceless_sym(rng, (100,))
    lap = rng.standard_normal((3, 100))
    derived = derive(LESLIE, ONE)
    zero = np.zeros((2, 2, 100))
    assert np.all(contraction_SigmaL(d[:2], A, zero, derived, lap[:2], lap[0]) == 0)
    skew = rng.standard_normal(100)
    M = np.array([[np.zeros(100), skew], [-skew, np.zeros(100)]])
    out = contraction_SigmaL(d[:2], A, M, derived, np.zeros((2, 100)), np.zeros(100))
    assert np.abs(out).max() <= 1e-15


def test_contraction_matches_direct_assembly():
    rng = np.random.default_rng(42)
    for _ in range(10):
        leslie = random_admissible(rng)
        frank = FrankCoefficients(*rng.uniform(0.2, 3, 3))
        derived = derive(leslie, frank)
        n = SAMPLES // 10
        d = random_unit(rng, (n,))
        A = random_traceless_sym(rng, (n,))
        M = rng.standard_normal((2, 2, n))
        lap = rng.standard_normal((3, n))
        direct = ddot(sigma_main(d, A, lap, frank.a, leslie), M)
        formula = contraction_SigmaL(d[:2], A, M, derived, lap[:2], np.sum(lap * d, axis=0))
        scale = 1 + np.abs(direct).max()
        assert np.abs(direct - formula).max() <= 1e-12 * scale


def test_remainders_vanish_for_equal_directors():
    rng = np.random.default_rng(1)
    d = random_unit(rng, (50,))
    rem = remainder_terms(d, d, random_traceless_sym(rng, (50,)), rng.standard_normal((3, 50)),
                          derive(LESLIE, ONE))
    assert np.all(rem.H_r == 0) and np.all(rem.M_r == 0) and np.all(rem.C_r == 0)


def test_remainders_vanish_without_strain():
    rng = np.random.default_rng(2)
    rem = remainder_terms(random_unit(rng, (50,)), random_unit(rng, (50,)), np.zeros((2, 2, 50)),
                          rng.standard_normal((3, 50)), derive(LESLIE, ONE))
    assert np.all(rem.H_r == 0) and np.all(rem.M_r == 0)


@given(admissible, st.integers(0, 2 ** 32 - 1))
def test_remainder_bounds_hold(leslie, seed):
    rng = np.random.default_rng(seed)
    rem = remainder_terms(random_unit(rng, (500,)), random_unit(rng, (500,)),
                          random_traceless_sym(rng, (500,)), 3 * rng.standard_normal((3, 500)),
                          derive(leslie, FrankCoefficients(*rng.uniform(0.2, 3, 3))))
    assert rem.bound_ok


def test_director_rhs_vanishes_at_equilibria(grid32):
    d = np.zeros((3, 32, 32))
    d[0] = 1.0
    u = np.zeros((2, 32, 32))
    assert np.all(director_rhs(u, d, ANISO, LESLIE, grid32).full == 0)
    assert np.abs(director_rhs(u, twist(grid32), ONE, LESLIE, grid32).full).max() <= 1e-12


@pytest.mark.parametrize("seed", range(3))
def test_director_rhs_is_orthogonal_to_d(seed):
    s = random_state(64, seed=seed)
    rhs = director_rhs(s.u, s.d, ANISO, LESLIE, s.grid).full
    dot = np.sum(s.d * rhs, axis=0)
    scale = np.sqrt(np.sum(rhs ** 2)) * np.sqrt(np.sum(s.d ** 2))
    assert abs(dot.sum()) <= 1e-6 * scale
    assert np.abs(dot).max() <= 1e-6 * np.abs(rhs).max()


def test_corotational_rate_reconstruction(state32):
    out = director_rhs(state32.u, state32.d, ANISO, LESLIE, state32.grid)
    A, _ = sym_skew(gradient(state32.u, state32.grid))
    sig = leslie_from_rate(state32.d[:2], A, out.N_hat, LESLIE)
    forms = leslie_stress_decomposed(state32.u, state32.d, ANISO, LESLIE, state32.grid)
    assert np.abs(sig - forms.sigmaL_original).max() <= 1e-12 * (1 + np.abs(sig).max())
    assert frob(sig).shape == (32, 32)
