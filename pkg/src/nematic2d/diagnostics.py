"""Twin-run stability instrumentation and the consolidated identity suite.

Two trajectories started from nearby data are compared through the
lower-order energy ``Phi = int(|xi|^2 + |grad xi|^2 + 2a|d1 - d2|^2)`` with
``xi = (-lap + I)^{-1}(u1 - u2)``. Growth of ``Phi`` is measured against the
cumulative integrand ``M(t) = int_0^t m``, where
``m = 1 + ||u1||_4^4 + ||u2||_4^4 + ||grad u2||_2^2 + ||lap d1||_2^2 + ||lap d2||_2^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coeffs import DerivedConstants, FrankCoefficients, LeslieCoefficients, derive
from .dynamics import (Integrator, SolverConfig, _director_explicit_hat, _momentum_explicit_hat,
                       dissipations, evaluate, n_steps)
from .errors import NematicError
from .initial import random_band_limited
from .leslie import (check_leslie_equivalence, contraction_SigmaL, ddot, difference_decompositions,
                     leslie_stress_decomposed, remainder_terms, sigma_main)
from .oseen_frank import ericksen_from, molecular_field
from .spectral import (Grid, State, check_xi_identities, gradient, hessian, helmholtz_inverse,
                       integrate, laplacian, leray_project, relative_residual, same_grid, sq_norm,
                       sym_skew)


# -- the twin functionals -----------------------------------------------------------

def lower_order_energy(state1: State, state2: State, a: float) -> dict:
    grid = same_grid(state1, state2)
    xi = helmholtz_inverse(state1.u - state2.u, grid)
    parts = {
        "phi_xi_l2": sq_norm(xi, grid),
        "phi_xi_h1": sq_norm(gradient(xi, grid), grid),
        "phi_d": 2 * a * sq_norm(state1.d - state2.d, grid),
    }
    parts["phi"] = parts["phi_xi_l2"] + parts["phi_xi_h1"] + parts["phi_d"]
    return parts


def gronwall_integrand(state1: State, state2: State) -> float:
    grid = same_grid(state1, state2)

    def l4(u):
        return integrate(np.sum(u ** 2, axis=0) ** 2, grid)

    return (1.0 + l4(state1.u) + l4(state2.u) + sq_norm(gradient(state2.u, grid), grid)
            + sq_norm(laplacian(state1.d, grid), grid) + sq_norm(laplacian(state2.d, grid), grid))


def dissipation_proxy(state1: State, state2: State, c0: float) -> float:
    grid = same_grid(state1, state2)
    xi = helmholtz_inverse(state1.u - state2.u, grid)
    return c0 * (sq_norm(gradient(xi, grid), grid) + sq_norm(hessian(xi, grid), grid)
                 + sq_norm(gradient(state1.d - state2.d, grid), grid))


# -- perturbations ---------------------------------------------------------------------

@dataclass(frozen=True)
class PerturbationSpec:
    epsilon: float = 1e-4
    target: str = "d"        # "d", "u" or "both"
    cutoff: int = 3
    seed: int = 1

    def __post_init__(self):
        if self.target not in ("d", "u", "both"):
            raise ValueError(f"perturbation target must be d, u or both, got {self.target!r}")
        if not (self.epsilon >= 0 and math.isfinite(self.epsilon)):
            raise ValueError("epsilon must be finite and non-negative")

    @classmethod
    def from_dict(cls, data: dict) -> "PerturbationSpec":
        return cls(**data)


def perturb(state: State, spec: PerturbationSpec) -> State:
    """Second twin: ``d`` moved along a tangent field and renormalised, and/or ``u`` shifted.

    The perturbation shape depends only on the seed and cutoff, so scaling
    ``epsilon`` moves along a fixed direction. ``epsilon = 0`` returns an exact copy.
    """
    grid = state.grid
    out = state.copy()
    if spec.epsilon == 0:
        return out
    rng = np.random.default_rng(spec.seed)
    v = random_band_limited(grid, 3, spec.cutoff, rng)
    w = leray_project(random_band_limited(grid, 2, spec.cutoff, rng), grid)
    if spec.target in ("d", "both"):
        v = v - np.sum(state.d * v, axis=0) * state.d
        d = state.d + spec.epsilon * v
        out.d = d / np.sqrt(np.sum(d ** 2, axis=0))
    if spec.target in ("u", "both"):
        out.u = state.u + spec.epsilon * w / np.abs(w).max()
    return out


# -- twin experiment ---------------------------------------------------------------------

TWIN_COLUMNS = ("t", "phi", "phi_xi_l2", "phi_xi_h1", "phi_d", "m", "M_cum",
                "dissipation_proxy", "gronwall_bound", "pass")


@dataclass
class TwinRow:
    t: float
    phi: float
    phi_xi_l2: float
    phi_xi_h1: float
    phi_d: float
    m: float
    M_cum: float
    dissipation_proxy: float
    gronwall_bound: float = float("nan")
    passed: bool = True

    def row(self) -> tuple:
        return (self.t, self.phi, self.phi_xi_l2, self.phi_xi_h1, self.phi_d, self.m, self.M_cum,
                self.dissipation_proxy, self.gronwall_bound, self.passed)


@dataclass
class TwinSeries:
    rows: list = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    @property
    def t(self):
        return self.column("t")

    @property
    def phi(self):
        return self.column("phi")

    @property
    def M(self):
        return self.column("M_cum")

    def log_ratio(self) -> np.ndarray:
        """``log(Phi(t)/Phi(0))``; requires ``Phi(0) > 0``."""
        phi = self.phi
        if not phi[0] > 0:
            raise ValueError("log ratio undefined when Phi(0) = 0")
        with np.errstate(divide="ignore"):
            return np.log(phi / phi[0])


@dataclass
class GronwallFit:
    C_eff: float
    C_cap: float
    passed: bool
    ratio: np.ndarray


def fit_gronwall(series: TwinSeries, C_cap: float | None = None) -> GronwallFit:
    """Effective exponent ``C_eff = max_{t>0} log(Phi/Phi0)/M`` and the cap test.

    When ``Phi(0) = 0`` the fit is degenerate: ``C_eff = 0`` and the run
    passes iff ``Phi`` stays identically zero. Also fills the bound and pass
    columns of ``series`` in place.
    """
    phi = series.phi
    M = series.M
    if not phi[0] > 0:
        ok = bool(np.all(phi == 0))
        for r in series.rows:
            r.gronwall_bound = 0.0
            r.passed = r.phi == 0
        return GronwallFit(0.0, 0.0 if C_cap is None else C_cap, ok, np.zeros_like(phi))
    ratio = series.log_ratio()
    later = M > 0
    C_eff = float(np.max(ratio[later] / M[later])) if later.any() else 0.0
    cap = C_eff if C_cap is None else C_cap
    ok = True
    for r, Mi in zip(series.rows, M):
        r.gronwall_bound = phi[0] * math.exp(cap * Mi)
        r.passed = bool(r.phi <= r.gronwall_bound * (1 + 1e-12))
        ok &= r.passed
    return GronwallFit(C_eff, cap, ok, ratio)


@dataclass
class TwinResult:
    series: TwinSeries
    fit: GronwallFit
    final: tuple


class TwinFailure(NematicError):
    """A solver error in one of the twin trajectories."""


def twin_experiment(state0: State, perturbation: PerturbationSpec, frank: FrankCoefficients,
                    leslie: LeslieCoefficients, cfg: SolverConfig, C_cap: float | None = None,
                    report_every: int = 1, sink=None) -> TwinResult:
    """Run an unperturbed and a perturbed trajectory in lockstep and compare them.

    ``M`` is accumulated with the trapezoid rule at every step; rows are
    emitted every ``report_every`` steps. Without ``C_cap`` the pass test
    uses the run's own ``C_eff`` (always passes); pass a cap fixed from a
    reference run to make the test meaningful.
    """
    derived = derive(leslie, frank)
    twins = [Integrator(state0, frank, leslie, cfg),
             Integrator(perturb(state0, perturbation), frank, leslie, cfg)]
    series = TwinSeries()

    def row(M_cum, m):
        s1, s2 = twins[0].state, twins[1].state
        parts = lower_order_energy(s1, s2, derived.a)
        return TwinRow(s1.t, parts["phi"], parts["phi_xi_l2"], parts["phi_xi_h1"], parts["phi_d"],
                       m, M_cum, dissipation_proxy(s1, s2, derived.c0_gronwall))

    m_prev = gronwall_integrand(twins[0].state, twins[1].state)
    M_cum = 0.0
    series.rows.append(row(M_cum, m_prev))
    total = n_steps(cfg)
    for i in range(1, total + 1):
        for label, integ in zip(("reference", "perturbed"), twins):
            try:
                integ.step()
            except NematicError as exc:
                raise TwinFailure(f"{label} twin failed: {exc}") from exc
        m = gronwall_integrand(twins[0].state, twins[1].state)
        M_cum += 0.5 * cfg.dt * (m + m_prev)
        m_prev = m
        if i % report_every == 0 or i == total:
            series.rows.append(row(M_cum, m))
    fit = fit_gronwall(series, C_cap)
    if sink is not None:
        for r in series.rows:
            sink.append(r)
    return TwinResult(series, fit, (twins[0].state, twins[1].state))


def curve_spread(ratios: list) -> float:
    """Largest pairwise gap between log-ratio curves, relative to the largest curve magnitude."""
    scale = max(float(np.abs(r).max()) for r in ratios)
    if scale == 0:
        return 0.0
    gap = max(float(np.abs(a - b).max()) for a in ratios for b in ratios)
    return gap / scale


# -- identity suite --------------------------------------------------------------------------

@dataclass
class SuiteRow:
    name: str
    group: str
    residual: float
    tolerance: float
    kind: str = "identity"   # "identity" (residual <= tol) or "bound" (min slack >= -tol)

    @property
    def passed(self) -> bool:
        if self.kind == "bound":
            return self.residual >= -self.tolerance
        return self.residual <= self.tolerance


@dataclass
class SuiteReport:
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    COLUMNS = ("name", "group", "residual", "tolerance", "pass")

    def csv_rows(self):
        return [(r.name, r.group, r.residual, r.tolerance, r.passed) for r in self.rows]

    def table(self) -> str:
        width = max(len(r.name) for r in self.rows)
        lines = [f"{'identity':<{width}}  {'group':<15} {'residual':>12} {'tol':>9}  result"]
        for r in self.rows:
            lines.append(f"{r.name:<{width}}  {r.group:<15} {r.residual:12.3e} {r.tolerance:9.1e}  "
                         f"{'pass' if r.passed else 'FAIL'}")
        return "\n".join(lines)


IDENTITY_TOL = 1e-8


def identity_suite(state: State, frank: FrankCoefficients, leslie: LeslieCoefficients,
                   seed: int = 0, epsilon: float = 0.1, ericksen_sign: float = 1.0) -> SuiteReport:
    """Evaluate every exact identity and explicit pointwise bound on one state.

    A second state for the difference identities is built by :func:`perturb`
    with the given seed. ``ericksen_sign = -1`` flips the Ericksen stress fed
    to the momentum-balance cross-check, a fault-injection hook used to show
    the suite notices a sign error.
    """
    grid = state.grid
    derived = derive(leslie, frank)
    tol = IDENTITY_TOL
    rows = []
    add = rows.append

    for name, res in check_xi_identities(state.u, grid).rows.items():
        add(SuiteRow(name, "helmholtz-lift", res, tol))

    mf = molecular_field(state.d, frank, grid, consistency_tol=math.inf)
    add(SuiteRow("h = div(dW/dgrad d) - dW/dd = 2a lap d + H", "molecular-field", mf.h_residual, tol))
    add(SuiteRow("h - (d.h)d = 2a(lap d + |grad d|^2 d) + H - (d.H)d", "molecular-field", mf.h_proj_residual, tol))

    forms = leslie_stress_decomposed(state.u, state.d, frank, leslie, grid)
    add(SuiteRow("Sigma_L = A-part + B-part + C-part", "leslie-split", forms.abc_residual, tol))
    add(SuiteRow("sigma_L = Sigma_L + Pi_L (N_hat from the director equation)", "leslie-split",
                 check_leslie_equivalence(state.u, state.d, frank, leslie, grid), tol))

    A, _ = sym_skew(gradient(state.u, grid))
    lap_d = laplacian(state.d, grid)
    rng = np.random.default_rng(seed)
    M = rng.standard_normal(A.shape)
    direct = ddot(sigma_main(state.d, A, lap_d, frank.a, leslie), M)
    formula = contraction_SigmaL(state.d[:2], A, M, derived, lap_d[:2], np.sum(lap_d * state.d, axis=0))
    add(SuiteRow("Sigma_L : M via symmetric/skew split", "leslie-split", relative_residual(direct, formula), tol))

    other = perturb(state, PerturbationSpec(epsilon=epsilon, target="both", seed=seed + 1))
    A2, _ = sym_skew(gradient(other.u, grid))
    lap_d2 = laplacian(other.d, grid)
    for name, res in difference_decompositions(state.d, other.d, A, A2, lap_d, lap_d2, derived).items():
        add(SuiteRow(name, "difference", res, tol))
    rem = remainder_terms(state.d, other.d, A2, lap_d2, derived)
    add(SuiteRow("|H_r| <= 4|A2||d_hat| (min slack)", "remainder", float(rem.slack_H.min()), 0.0, "bound"))
    add(SuiteRow("|M_r| <= 2|A2||d_hat| (min slack)", "remainder", float(rem.slack_M.min()), 0.0, "bound"))
    add(SuiteRow("|C_r| <= 6a|l2/l1||lap d2||d| (min slack)", "remainder", float(rem.slack_C.min()), 0.0, "bound"))

    add(SuiteRow("momentum power = -(flow dissipation) - elastic coupling", "energy-law",
                 _power_balance_residual(state, frank, leslie, ericksen_sign), tol))
    return SuiteReport(rows)


def _power_balance_residual(state, frank, leslie, ericksen_sign=1.0) -> float:
    """Relative residual of the instantaneous energy law ``dE/dt = -D``.

    Both sides are assembled independently: the left from the momentum and
    director tendencies, the right from the dissipation integrals.
    """
    grid = state.grid
    ev = evaluate(state, frank)
    if ericksen_sign != 1.0:
        # fault injection: add (sign - 1) * sigma_E on top of the correct stress
        extra = (ericksen_sign - 1.0) * ericksen_from(ev.g, ev.dW_dgrad)
        kx, ky = grid.wavenumbers
        eh = grid.fft(extra)
        extra_hat = 1j * kx * eh[:, 0] + 1j * ky * eh[:, 1]
    else:
        extra_hat = 0.0
    nu_u = 0.5 * leslie.mu4
    nu_d = -2.0 * frank.a / leslie.lambda1
    fu = grid.ifft(_momentum_explicit_hat(ev, frank, leslie, False) + extra_hat
                   - nu_u * grid.k2 * grid.fft(state.u))
    fd = grid.ifft(_director_explicit_hat(ev, frank, leslie, False) - nu_d * grid.k2 * grid.fft(state.d))
    h = 2 * frank.a * ev.lap_d + ev.H
    dE = integrate(np.sum(state.u * fu, axis=0), grid) - integrate(np.sum(h * fd, axis=0), grid)
    D = sum(dissipations(ev, leslie))
    scale = abs(dE) + abs(D)
    return 0.0 if scale == 0 else abs(dE + D) / scale
