import math

import numpy as np
import pytest

from conftest import ANISO, LESLIE, ONE, random_state
from nematic2d.coeffs import derive
from nematic2d.diagnostics import (PerturbationSpec, TwinRow, TwinSeries, curve_spread,
                                   dissipation_proxy, fit_gronwall, gronwall_integrand,
                                   identity_suite, lower_order_energy, perturb, twin_experiment)
from nematic2d.dynamics import SolverConfig
from nematic2d.spectral import Grid, State


def _rest(grid):
    d = np.zeros((3, grid.n, grid.n))
    d[0] = 1.0
    return State(np.zeros((2, grid.n, grid.n)), d, 0.0, grid)


def _shear(grid):
    s = _rest(grid)
    _, y = grid.coords
    s.u = np.stack([np.sin(y), np.zeros_like(y)])
    return s


def test_phi_of_equal_states_is_zero(state32):
    assert lower_order_energy(state32, state32.copy(), 1.0)["phi"] == 0


def test_phi_of_single_shear_mode(grid32):
    parts = lower_order_energy(_shear(grid32), _rest(grid32), 1.0)
    assert parts["phi"] == pytest.approx(math.pi ** 2, rel=1e-12)
    assert parts["phi_xi_l2"] == pytest.approx(parts["phi_xi_h1"], rel=1e-12)
    assert parts["phi_d"] == 0


def test_phi_director_part():
    grid = Grid(16)
    a, b = _rest(grid), _rest(grid)
    b.d = np.zeros_like(b.d)
    b.d[1] = 1.0
    assert lower_order_energy(a, b, 0.5)["phi_d"] == pytest.approx(2 * (2 * math.pi) ** 2)


def test_phi_scales_quadratically_in_epsilon():
    s = random_state(32, seed=0)
    phis = [lower_order_energy(s, perturb(s, PerturbationSpec(e, "both")), 1.0)["phi"]
            for e in (1e-3, 1e-4)]
    assert phis[0] / phis[1] == pytest.approx(100.0, rel=0.01)


def test_integrand_examples(grid32):
    assert gronwall_integrand(_rest(grid32), _rest(grid32)) == pytest.approx(1.0, abs=1e-12)
    one = gronwall_integrand(_shear(grid32), _rest(grid32))
    two = gronwall_integrand(_rest(grid32), _shear(grid32))
    assert one == pytest.approx(1 + 1.5 * math.pi ** 2, rel=1e-12)
    assert two == pytest.approx(1 + 3.5 * math.pi ** 2, rel=1e-12)


def test_dissipation_proxy_nonnegative():
    s = random_state(32, seed=1)
    o = perturb(s, PerturbationSpec(0.1, "both"))
    c0 = derive(LESLIE, ONE).c0_gronwall
    assert dissipation_proxy(s, o, c0) > 0
    assert dissipation_proxy(s, s, c0) == 0


@pytest.mark.parametrize("target", ["d", "u", "both"])
def test_perturbation_targets(target):
    s = random_state(16, seed=0)
    p = perturb(s, PerturbationSpec(1e-2, target))
    assert np.array_equal(p.u, s.u) == (target == "d")
    assert np.array_equal(p.d, s.d) == (target == "u")
    assert np.abs(np.sqrt(np.sum(p.d ** 2, axis=0)) - 1).max() <= 1e-14


def test_perturbation_spec_rejects_bad_values():
    with pytest.raises(ValueError):
        PerturbationSpec(target="x")
    with pytest.raises(ValueError):
        PerturbationSpec(epsilon=-1)


def test_zero_perturbation_gives_identical_twins():
    s = random_state(16, seed=0, amplitude=0.1, tilt=0.1)
    res = twin_experiment(s, PerturbationSpec(0.0), ONE, LESLIE, SolverConfig(dt=1e-3, t_end=0.01))
    assert np.all(res.series.phi == 0)
    assert res.fit.passed and res.fit.C_eff == 0


def _series(phi, M):
    return TwinSeries([TwinRow(i, p, 0, 0, 0, 1, m, 0) for i, (p, m) in enumerate(zip(phi, M))])


def test_gronwall_fit_and_cap():
    M = np.array([0.0, 1.0, 2.0])
    series = _series(np.exp(-0.5 * M), M)
    fit = fit_gronwall(series)
    assert fit.C_eff == pytest.approx(-0.5)
    assert fit_gronwall(series, C_cap=5.0).passed
    assert not fit_gronwall(series, C_cap=-1.0).passed
    assert series.rows[-1].gronwall_bound == pytest.approx(math.exp(-2.0))


def test_gronwall_fit_zero_phi_must_stay_zero():
    assert not fit_gronwall(_series([0.0, 1e-30], [0.0, 1.0])).passed


def test_curve_spread():
    a = np.array([0.0, -1.0, -2.0])
    assert curve_spread([a, a]) == 0
    assert curve_spread([a, 1.1 * a]) == pytest.approx(0.2 / 2.2)
    assert curve_spread([np.zeros(3)]) == 0


@pytest.mark.parametrize("frank", [ONE, ANISO], ids=["one-constant", "anisotropic"])
def test_identity_suite_passes(frank):
    report = identity_suite(random_state(64, seed=3), frank, LESLIE)
    assert report.passed, report.table()
    groups = {r.group for r in report.rows}
    assert groups == {"helmholtz-lift", "molecular-field", "leslie-split", "difference",
                      "remainder", "energy-law"}
    assert len(report.csv_rows()) == len(report.rows)


def test_identity_suite_catches_ericksen_sign_error():
    report = identity_suite(random_state(64, seed=3), ANISO, LESLIE, ericksen_sign=-1.0)
    failed = [r for r in report.rows if not r.passed]
    assert [r.group for r in failed] == ["energy-law"]
