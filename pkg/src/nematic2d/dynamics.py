"""IMEX pseudo-spectral time stepping of the Ericksen-Leslie system on the torus.

The stiff linear pieces, ``(mu4/2) lap u`` in the momentum equation and
``(-2a/l1) lap d`` in the director equation, are advanced implicitly (they
are diagonal in Fourier space); everything else is explicit. The Leslie
stress enters through its split form so the momentum tendency never needs
``dt d``. After each step ``u`` is re-projected onto divergence-free fields
and ``d`` is renormalised pointwise.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .coeffs import FrankCoefficients, LeslieCoefficients
from .errors import ConstraintDrift, NonFinite
from .leslie import director_rate_terms, matvec, sigma_main, sigma_perturbation
from .oseen_frank import anisotropic_derivatives, ericksen_from, model_density
from .spectral import (Grid, State, advect, divergence, gradient, integrate, laplacian,
                       leray_project_spectral, max_divergence, sq_norm, sym_skew)

log = logging.getLogger(__name__)

DRIFT_LIMIT = 1e-3


@dataclass(frozen=True)
class SolverConfig:
    dt: float = 1e-3
    t_end: float = 0.1
    imex_theta: float = 1.0
    renormalize_every: int = 1
    dealias: bool = True
    cfl_safety: float = 0.5
    scheme: str = "imex_euler"  # or "cnab2"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end >= 0:
            raise ValueError("t_end must be non-negative")
        if not 0.5 <= self.imex_theta <= 1.0:
            raise ValueError("imex_theta must lie in [1/2, 1]")
        if self.renormalize_every < 1:
            raise ValueError("renormalize_every must be >= 1")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.scheme not in ("imex_euler", "cnab2"):
            raise ValueError(f"unknown scheme {self.scheme!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "SolverConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown solver keys: {sorted(unknown)}")
        return cls(**data)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class StepReport:
    t: float
    E_kin: float
    E_elastic: float
    D_visc: float
    D_rot: float
    energy_residual: float
    d_drift: float
    div_u: float

    CSV_COLUMNS = ("t", "E_kin", "E_elastic", "D_visc", "D_rot", "energy_residual", "d_drift", "div_u")

    @property
    def energy(self) -> float:
        return self.E_kin + self.E_elastic

    @property
    def dissipation(self) -> float:
        return self.D_visc + self.D_rot

    def row(self) -> tuple:
        return tuple(getattr(self, c) for c in self.CSV_COLUMNS)


@dataclass
class Evaluation:
    """Everything derived from one state that tendencies and diagnostics share."""

    state: State
    g: np.ndarray         # grad d
    A: np.ndarray
    Om: np.ndarray
    lap_d: np.ndarray
    dW_dgrad: np.ndarray
    H: np.ndarray
    h_proj: np.ndarray
    W: np.ndarray


def evaluate(state: State, frank: FrankCoefficients) -> Evaluation:
    grid = state.grid
    u, d = state.u, state.d
    g = gradient(d, grid)
    dV_dgrad, dV_dd = anisotropic_derivatives(d, g, frank)
    lap_d = laplacian(d, grid)
    H = divergence(dV_dgrad, grid) - dV_dd
    h = 2 * frank.a * lap_d + H
    h_proj = h - np.sum(d * h, axis=0) * d
    A, Om = sym_skew(gradient(u, grid))
    dW_dgrad = 2 * frank.a * g + dV_dgrad
    return Evaluation(state, g, A, Om, lap_d, dW_dgrad, H, h_proj, model_density(d, g, frank))


def _momentum_explicit_hat(ev: Evaluation, frank, leslie, dealias):
    """Spectral explicit momentum tendency (the ``mu4 A`` stress is left to the implicit part)."""
    grid = ev.state.grid
    u, d = ev.state.u, ev.state.d
    stress = (ericksen_from(ev.g, ev.dW_dgrad)
              + sigma_main(d, ev.A, ev.lap_d, frank.a, leslie) - leslie.mu4 * ev.A
              + sigma_perturbation(d, ev.H, leslie))
    kx, ky = grid.wavenumbers
    sh = grid.fft(stress)
    div_hat = 1j * kx * sh[:, 0] + 1j * ky * sh[:, 1]
    rhs = div_hat - grid.fft(advect(u, u, grid))
    if dealias:
        rhs = rhs * grid.dealias_mask
    return leray_project_spectral(rhs, grid)


def _director_explicit_hat(ev: Evaluation, frank, leslie, dealias):
    """Spectral explicit director tendency (``(-2a/l1) lap d`` is left to the implicit part)."""
    grid = ev.state.grid
    u, d = ev.state.u, ev.state.d
    lin = (-2 * frank.a / leslie.lambda1) * ev.lap_d
    rate = director_rate_terms(u, d, ev.h_proj, leslie, grid) - lin - advect(u, d, grid)
    rhs = grid.fft(rate)
    if dealias:
        rhs = rhs * grid.dealias_mask
    return rhs


def _viscosities(frank, leslie):
    return 0.5 * leslie.mu4, -2.0 * frank.a / leslie.lambda1


def momentum_rhs(state: State, frank: FrankCoefficients, leslie: LeslieCoefficients,
                 dealias: bool = False) -> np.ndarray:
    """``P[-(u.grad)u + div(sigma_E + Sigma_L + Pi_L)]``; the pressure is never formed."""
    ev = evaluate(state, frank)
    grid = state.grid
    rhs = _momentum_explicit_hat(ev, frank, leslie, dealias)
    nu_u, _ = _viscosities(frank, leslie)
    rhs = rhs - nu_u * grid.k2 * leray_project_spectral(grid.fft(state.u), grid)
    out = grid.ifft(rhs)
    if not np.isfinite(out).all():
        raise NonFinite(f"momentum tendency overflowed at t={state.t}")
    return out


def director_tendency(state: State, frank: FrankCoefficients, leslie: LeslieCoefficients,
                      dealias: bool = False) -> np.ndarray:
    """Full ``dt d`` as assembled by the stepper (explicit plus implicit pieces)."""
    ev = evaluate(state, frank)
    grid = state.grid
    _, nu_d = _viscosities(frank, leslie)
    rhs = _director_explicit_hat(ev, frank, leslie, dealias) - nu_d * grid.k2 * grid.fft(state.d)
    return grid.ifft(rhs)


def energies(ev: Evaluation) -> tuple:
    grid = ev.state.grid
    return 0.5 * sq_norm(ev.state.u, grid), integrate(ev.W, grid)


def dissipations(ev: Evaluation, leslie: LeslieCoefficients) -> tuple:
    """Viscous ``int Q(d, A, A)`` and rotational ``-(1/l1) int |h - (d.h)d|^2``."""
    L = leslie
    grid = ev.state.grid
    q = L.lambda2 ** 2 / L.lambda1
    d_hat = ev.state.d[:2]
    Ad = matvec(ev.A, d_hat)
    dAd = np.sum(d_hat * Ad, axis=0)
    Q = (L.mu1 - q) * dAd ** 2 + L.mu4 * np.sum(ev.A ** 2, axis=(0, 1)) + (L.mu5 + L.mu6 + q) * np.sum(Ad ** 2, axis=0)
    return integrate(Q, grid), -sq_norm(ev.h_proj, grid) / L.lambda1


class Integrator:
    """Advances one trajectory; holds the history a multistep scheme needs."""

    def __init__(self, state: State, frank: FrankCoefficients, leslie: LeslieCoefficients,
                 cfg: SolverConfig):
        self.state = state
        self.frank = frank
        self.leslie = leslie
        self.cfg = cfg
        self.steps = 0
        self._ev = evaluate(state, frank)
        self._prev_explicit = None
        self._cfl_warned = False
        e_kin, e_el = energies(self._ev)
        d_visc, d_rot = dissipations(self._ev, leslie)
        drift = float(np.abs(np.sqrt(np.sum(state.d ** 2, axis=0)) - 1).max())
        self.report = StepReport(state.t, e_kin, e_el, d_visc, d_rot, 0.0, drift,
                                 max_divergence(state.u, state.grid))

    def step(self) -> StepReport:
        cfg, grid = self.cfg, self.state.grid
        ev = self._ev
        dt = cfg.dt
        if not self._cfl_warned:
            cfl = dt * float(np.sqrt(np.sum(self.state.u ** 2, axis=0)).max()) / grid.spacing
            if cfl > cfg.cfl_safety:
                log.warning("advective CFL number %.3g exceeds safety factor %.3g at t=%g",
                            cfl, cfg.cfl_safety, self.state.t)
                self._cfl_warned = True
        nu_u, nu_d = _viscosities(self.frank, self.leslie)
        nu_hat = (self._momentum(ev), self._director(ev))
        if cfg.scheme == "cnab2":
            theta = 0.5
            if self._prev_explicit is not None:
                explicit = tuple(1.5 * a - 0.5 * b for a, b in zip(nu_hat, self._prev_explicit))
            else:
                explicit = nu_hat
        else:
            theta = cfg.imex_theta
            explicit = nu_hat
        self._prev_explicit = nu_hat

        new = []
        for f, expl, nu in ((self.state.u, explicit[0], nu_u), (self.state.d, explicit[1], nu_d)):
            lam = nu * grid.k2
            fh = grid.fft(f)
            new.append(((1 - (1 - theta) * dt * lam) * fh + dt * expl) / (1 + theta * dt * lam))
        u = grid.ifft(leray_project_spectral(new[0], grid))
        d = grid.ifft(new[1])
        t = self.state.t + dt
        if not (np.isfinite(u).all() and np.isfinite(d).all()):
            raise NonFinite(f"non-finite state at t={t:.6g}")
        norm = np.sqrt(np.sum(d ** 2, axis=0))
        drift = float(np.abs(norm - 1).max())
        if drift > DRIFT_LIMIT:
            raise ConstraintDrift(f"max | |d| - 1 | = {drift:.3e} before projection at t={t:.6g}; "
                                  f"reduce dt")
        self.steps += 1
        if self.steps % cfg.renormalize_every == 0:
            d = d / norm
        self.state = State(u, d, t, grid)
        new_ev = evaluate(self.state, self.frank)
        e_kin, e_el = energies(new_ev)
        d_visc, d_rot = dissipations(new_ev, self.leslie)
        old = self.report
        residual = (e_kin + e_el - old.energy) / dt + 0.5 * (old.dissipation + d_visc + d_rot)
        self.report = StepReport(t, e_kin, e_el, d_visc, d_rot, residual, drift, max_divergence(u, grid))
        self._ev = new_ev
        return self.report

    def _momentum(self, ev):
        return _momentum_explicit_hat(ev, self.frank, self.leslie, self.cfg.dealias)

    def _director(self, ev):
        return _director_explicit_hat(ev, self.frank, self.leslie, self.cfg.dealias)


def step(state: State, frank: FrankCoefficients, leslie: LeslieCoefficients,
         cfg: SolverConfig) -> tuple:
    """One reference step from ``state``; returns ``(new_state, StepReport)``."""
    integ = Integrator(state, frank, leslie, cfg)
    report = integ.step()
    return integ.state, report


def n_steps(cfg: SolverConfig) -> int:
    return int(math.floor(cfg.t_end / cfg.dt + 1e-9))


def run(state0: State, frank: FrankCoefficients, leslie: LeslieCoefficients, cfg: SolverConfig,
        sink=None, report_every: int = 1, checkpoint_every: int = 0, checkpoint_dir=None) -> State:
    """Step until ``t_end``; reports go to ``sink`` (any callable or an object with ``append``).

    Checkpoints are written to ``checkpoint_dir`` every ``checkpoint_every``
    steps and once at the end. On failure the last good state is saved as
    ``last_good.els`` before the error propagates.
    """
    from .checkpoint import write_checkpoint

    emit = None
    if sink is not None:
        emit = sink.append if hasattr(sink, "append") else sink
    integ = Integrator(state0, frank, leslie, cfg)
    if emit:
        emit(integ.report)
    total = n_steps(cfg)
    for i in range(1, total + 1):
        good = integ.state
        try:
            report = integ.step()
        except (NonFinite, ConstraintDrift):
            if checkpoint_dir is not None:
                write_checkpoint(f"{checkpoint_dir}/last_good.els", good)
            raise
        if emit and (i % report_every == 0 or i == total):
            emit(report)
        if checkpoint_dir is not None and checkpoint_every and i % checkpoint_every == 0:
            write_checkpoint(f"{checkpoint_dir}/step_{i:07d}.els", integ.state)
    if checkpoint_dir is not None:
        write_checkpoint(f"{checkpoint_dir}/final.els", integ.state)
    return integ.state
