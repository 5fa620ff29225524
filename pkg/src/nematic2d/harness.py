"""Run orchestration: each experiment mode writes a self-contained run directory.

A run directory holds ``config.json`` (the resolved configuration; feeding
it back reproduces every CSV bitwise), ELS1 checkpoints, CSV series and
SVG figures.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .checkpoint import CsvSink, write_checkpoint
from .config import RunConfig, expand_sweep, with_delta
from .diagnostics import (TWIN_COLUMNS, SuiteReport, curve_spread, fit_gronwall, identity_suite,
                          twin_experiment)
from .dynamics import StepReport, run
from .initial import generate_initial
from .spectral import State, max_divergence

#: end-of-run constraint tolerances
UNIT_NORM_TOL = 1e-12
DIVERGENCE_TOL = 1e-10

SUMMARY_COLUMNS = ("label", "value", "mode", "passed", "detail")


def initial_state(cfg: RunConfig) -> State:
    return generate_initial(cfg.initial, cfg.grid.build())


def constraint_errors(state: State) -> tuple:
    """``(max | |d| - 1 |, max |div u|)`` of a state."""
    drift = float(np.abs(np.sqrt(np.sum(state.d ** 2, axis=0)) - 1).max())
    return drift, max_divergence(state.u, state.grid)


def _prepare(cfg: RunConfig, out_dir) -> str:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "config.json"), "w") as fh:
        fh.write(cfg.dumps() + "\n")
    return out_dir


@dataclass
class SimulationResult:
    out_dir: str
    final: State
    reports: list
    unit_drift: float
    divergence: float

    @property
    def passed(self) -> bool:
        return self.unit_drift <= UNIT_NORM_TOL and self.divergence <= DIVERGENCE_TOL

    @property
    def detail(self) -> str:
        return f"unit_drift={self.unit_drift:.3e} div_u={self.divergence:.3e}"


def run_simulation(cfg: RunConfig, out_dir, plot: bool = True) -> SimulationResult:
    _prepare(cfg, out_dir)
    state0 = initial_state(cfg)
    reports = []
    csv_path = os.path.join(out_dir, "steps.csv")
    with CsvSink(csv_path, StepReport.CSV_COLUMNS) as sink:
        def emit(report):
            reports.append(report)
            sink.append(report)
        final = run(state0, cfg.frank, cfg.leslie, cfg.solver, sink=emit,
                    report_every=cfg.outputs.report_every,
                    checkpoint_every=cfg.outputs.checkpoint_every,
                    checkpoint_dir=os.path.join(out_dir, "checkpoints"))
    if plot:
        from .plotting import plot_energy
        plot_energy(csv_path, os.path.join(out_dir, "energy.svg"))
    drift, div = constraint_errors(final)
    return SimulationResult(out_dir, final, reports, drift, div)


@dataclass
class TwinRun:
    epsilon: float
    C_eff: float
    passed: bool
    phi0: float
    phi_end: float
    ratio: np.ndarray = field(repr=False)
    csv_path: str = ""


@dataclass
class TwinOutcome:
    out_dir: str
    C_cap: float
    runs: list
    spread: float
    spread_tol: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.runs) and self.spread <= self.spread_tol

    @property
    def detail(self) -> str:
        c_eff = ", ".join(f"{r.C_eff:.4g}" for r in self.runs)
        return f"C_cap={self.C_cap:.4g} C_eff=[{c_eff}] spread={self.spread:.3e}"


def _one_twin(cfg: RunConfig, state0: State, epsilon: float):
    pert = replace(cfg.twin.perturbation, epsilon=epsilon)
    return twin_experiment(state0, pert, cfg.frank, cfg.leslie, cfg.solver,
                           report_every=cfg.outputs.report_every)


def _cap_from(cfg: RunConfig, C_eff: float) -> float:
    # magnitude: smooth runs have Phi decaying (C_eff < 0), where a plain multiple would tighten the bound
    return cfg.twin.cap_factor * abs(C_eff)


def reference_cap(cfg: RunConfig, epsilon: float | None = None) -> float:
    """``cap_factor * |C_eff|`` of the one-constant twin run built from ``cfg``."""
    if cfg.twin.C_cap is not None:
        return cfg.twin.C_cap
    ref = with_delta(cfg, 0.0)
    eps = cfg.twin.epsilons[0] if epsilon is None else epsilon
    return _cap_from(cfg, _one_twin(ref, initial_state(ref), eps).fit.C_eff)


def run_twin(cfg: RunConfig, out_dir, C_cap: float | None = None, threads: int = 1,
             plot: bool = True) -> TwinOutcome:
    """Twin runs for every configured epsilon against one cap; curves must agree.

    Without an explicit cap it is fixed from the one-constant reference run
    at the first positive epsilon (reused directly when ``cfg`` is itself
    one-constant).
    """
    _prepare(cfg, out_dir)
    state0 = initial_state(cfg)
    eps = cfg.twin.epsilons
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(lambda e: _one_twin(cfg, state0, e), eps))
    else:
        results = [_one_twin(cfg, state0, e) for e in eps]
    if C_cap is None:
        C_cap = cfg.twin.C_cap
    if C_cap is None:
        positive = [i for i, e in enumerate(eps) if e > 0]
        if not positive:
            C_cap = 0.0
        elif cfg.frank.delta == 0:
            C_cap = _cap_from(cfg, results[positive[0]].fit.C_eff)
        else:
            C_cap = reference_cap(cfg, eps[positive[0]])
    runs = []
    for e, result in zip(eps, results):
        result.fit = fit_gronwall(result.series, C_cap)
        sub = os.path.join(out_dir, f"eps_{e:.0e}")
        csv_path = os.path.join(sub, "twin.csv")
        with CsvSink(csv_path, TWIN_COLUMNS) as sink:
            for row in result.series.rows:
                sink.append(row)
        write_checkpoint(os.path.join(sub, "reference_final.els"), result.final[0])
        write_checkpoint(os.path.join(sub, "perturbed_final.els"), result.final[1])
        phi = result.series.phi
        runs.append(TwinRun(e, result.fit.C_eff, result.fit.passed, float(phi[0]), float(phi[-1]),
                            result.fit.ratio, csv_path))
    curves = [r.ratio for r in runs if r.phi0 > 0]
    spread = curve_spread(curves) if len(curves) > 1 else 0.0
    outcome = TwinOutcome(out_dir, C_cap, runs, spread, cfg.twin.spread_tol)
    with CsvSink(os.path.join(out_dir, "twin_summary.csv"),
                 ("epsilon", "phi0", "phi_end", "C_eff", "C_cap", "passed")) as sink:
        for r in runs:
            sink.append((r.epsilon, r.phi0, r.phi_end, r.C_eff, C_cap, r.passed))
    if plot:
        from .plotting import plot_twin
        plot_twin([r.csv_path for r in runs], os.path.join(out_dir, "twin.svg"),
                  labels=[f"eps={r.epsilon:.0e}" for r in runs])
    return outcome


@dataclass
class IdentityOutcome:
    out_dir: str
    report: SuiteReport

    @property
    def passed(self) -> bool:
        return self.report.passed

    @property
    def detail(self) -> str:
        exact = [r for r in self.report.rows if r.kind == "identity"]
        worst = max(exact, key=lambda r: r.residual)
        failed = [r.name for r in self.report.rows if not r.passed]
        return f"worst identity {worst.name}={worst.residual:.3e} failed={failed}"


def run_identities(cfg: RunConfig, out_dir) -> IdentityOutcome:
    _prepare(cfg, out_dir)
    state = initial_state(cfg)
    report = identity_suite(state, cfg.frank, cfg.leslie, seed=cfg.initial.seed)
    with CsvSink(os.path.join(out_dir, "identities.csv"), SuiteReport.COLUMNS) as sink:
        for row in report.csv_rows():
            sink.append(row)
    return IdentityOutcome(out_dir, report)


def run_mode(cfg: RunConfig, out_dir, mode: str | None = None, C_cap=None, threads: int = 1):
    mode = mode or cfg.mode
    if mode == "simulate":
        return run_simulation(cfg, out_dir)
    if mode == "twin":
        return run_twin(cfg, out_dir, C_cap=C_cap, threads=threads)
    if mode == "identities":
        return run_identities(cfg, out_dir)
    if mode == "sweep":
        return run_sweep(cfg, out_dir, threads=threads)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass
class SweepOutcome:
    out_dir: str
    children: list  # (label, value, outcome)

    @property
    def passed(self) -> bool:
        return all(o.passed for _, _, o in self.children)

    @property
    def detail(self) -> str:
        return f"{sum(o.passed for _, _, o in self.children)}/{len(self.children)} children passed"


def run_sweep(cfg: RunConfig, out_dir, threads: int = 1) -> SweepOutcome:
    """Child runs in sub-directories, one summary CSV written by this process only.

    For twin children the cap is fixed once from the one-constant reference
    run, so every child is judged against the same bound.
    """
    _prepare(cfg, out_dir)
    children = expand_sweep(cfg)
    C_cap = None
    if cfg.sweep.mode == "twin":
        positive = [e for e in cfg.twin.epsilons if e > 0]
        C_cap = reference_cap(cfg, positive[0]) if positive else 0.0

    def one(item):
        label, value, child = item
        return label, value, run_mode(child, os.path.join(out_dir, label), C_cap=C_cap)

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(one, children))
    else:
        results = [one(c) for c in children]
    with CsvSink(os.path.join(out_dir, "summary.csv"), SUMMARY_COLUMNS) as sink:
        for label, value, outcome in results:
            sink.append((label, value, cfg.sweep.mode, outcome.passed, outcome.detail))
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump({"passed": all(o.passed for _, _, o in results), "C_cap": C_cap,
                   "children": [{"label": lab, "value": v, "passed": o.passed, "detail": o.detail}
                                for lab, v, o in results]}, fh, indent=2)
    return SweepOutcome(out_dir, results)
