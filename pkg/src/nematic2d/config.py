"""Run configuration: JSON parsing with aggregated validation, and sweep expansion.

A configuration has the sections ``grid``, ``coefficients``, ``solver``,
``initial_data``, ``outputs`` and ``experiment``. Every problem found is
reported with a dotted path, for example ``coefficients.leslie.lambda1``.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources

from .coeffs import FrankCoefficients, LeslieCoefficients, delta0, validate
from .diagnostics import PerturbationSpec
from .dynamics import SolverConfig
from .errors import NonFinite, ParseError, ValidationError
from .initial import GENERATORS, InitialDataSpec
from .spectral import Grid

MODES = ("simulate", "twin", "identities", "sweep")
SWEEP_AXES = ("delta", "epsilon", "dt", "seed")

# where a failed coefficient constraint is reported
_CONSTRAINT_PATHS = {
    "lambda1 < 0": "coefficients.leslie.lambda1",
    "lambda1 = mu2 - mu3": "coefficients.leslie.lambda1",
    "lambda2 = mu5 - mu6": "coefficients.leslie.lambda2",
    "parodi: mu2 + mu3 = mu6 - mu5": "coefficients.leslie",
    "mu1 - lambda2^2/lambda1 >= 0": "coefficients.leslie.mu1",
    "mu4 > 0": "coefficients.leslie.mu4",
    "mu5 + mu6 >= -lambda2^2/lambda1": "coefficients.leslie.mu5",
    "k1 > 0": "coefficients.frank.k1",
    "k2 > 0": "coefficients.frank.k2",
    "k3 > 0": "coefficients.frank.k3",
}


@dataclass(frozen=True)
class GridSpec:
    n: int = 64
    length: float = 2 * math.pi

    def build(self) -> Grid:
        return Grid(self.n, self.length)


@dataclass(frozen=True)
class OutputSpec:
    report_every: int = 1
    checkpoint_every: int = 0
    out_dir: str | None = None


@dataclass(frozen=True)
class TwinSpec:
    epsilons: tuple = (1e-4,)
    perturbation: PerturbationSpec = field(default_factory=PerturbationSpec)
    C_cap: float | None = None      # None: 10 |C_eff| of the first listed epsilon's run
    cap_factor: float = 10.0
    spread_tol: float = 0.25


@dataclass(frozen=True)
class SweepSpec:
    axis: str = "delta"
    values: tuple = ()
    relative_to_delta0: bool = False  # delta values are multiples of delta0
    mode: str = "twin"                # what each child runs


@dataclass(frozen=True)
class RunConfig:
    grid: GridSpec
    leslie: LeslieCoefficients
    frank: FrankCoefficients
    c0_abs: float
    solver: SolverConfig
    initial: InitialDataSpec
    outputs: OutputSpec
    mode: str
    twin: TwinSpec
    sweep: SweepSpec
    raw: dict = field(repr=False, compare=False, default_factory=dict)

    @property
    def delta0(self) -> float:
        return delta0(self.leslie, self.frank, self.c0_abs)

    def to_dict(self) -> dict:
        """Fully resolved configuration (defaults filled in), as JSON-ready data."""
        pert = asdict(self.twin.perturbation)
        return {
            "grid": asdict(self.grid),
            "coefficients": {"leslie": self.leslie.as_dict(), "frank": self.frank.as_dict(),
                             "c0_abs": self.c0_abs},
            "solver": self.solver.as_dict(),
            "initial_data": {**asdict(self.initial), "director": list(self.initial.director)},
            "outputs": asdict(self.outputs),
            "experiment": {
                "mode": self.mode,
                "twin": {"epsilons": list(self.twin.epsilons), "target": pert["target"],
                         "cutoff": pert["cutoff"], "seed": pert["seed"], "C_cap": self.twin.C_cap,
                         "cap_factor": self.twin.cap_factor, "spread_tol": self.twin.spread_tol},
                "sweep": {"axis": self.sweep.axis, "values": list(self.sweep.values),
                          "relative_to_delta0": self.sweep.relative_to_delta0,
                          "mode": self.sweep.mode},
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


class _Collector:
    """Accumulates (path, message) pairs while reading nested dictionaries."""

    def __init__(self):
        self.errors = []

    def add(self, path, msg):
        self.errors.append((path, msg))

    def section(self, data, key, path):
        value = data.get(key, {})
        if not isinstance(value, dict):
            self.add(path, "must be an object")
            return {}
        return value

    def unknown(self, data, allowed, path):
        for key in sorted(set(data) - set(allowed)):
            self.add(f"{path}.{key}" if path else key, "unknown key")

    def number(self, data, key, path, default=None, required=False, integer=False):
        if key not in data:
            if required:
                self.add(path, "required")
            return default
        value = data[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.add(path, "must be a number")
            return default
        if integer and int(value) != value:
            self.add(path, "must be an integer")
            return default
        if not math.isfinite(value):
            self.add(path, "must be finite")
            return default
        return int(value) if integer else float(value)


def _read_leslie(c: _Collector, data: dict):
    base = "coefficients.leslie"
    mus = ("mu1", "mu2", "mu3", "mu4", "mu5", "mu6")
    c.unknown(data, mus + ("lambda1", "lambda2"), base)
    vals = {k: c.number(data, k, f"{base}.{k}", required=True) for k in mus}
    if any(v is None for v in vals.values()):
        return None
    lam1 = c.number(data, "lambda1", f"{base}.lambda1", default=vals["mu2"] - vals["mu3"])
    lam2 = c.number(data, "lambda2", f"{base}.lambda2", default=vals["mu5"] - vals["mu6"])
    if lam1 is None or lam2 is None:
        return None
    return LeslieCoefficients(lambda1=lam1, lambda2=lam2, **vals)


def _read_frank(c: _Collector, data: dict):
    base = "coefficients.frank"
    if "a" in data:
        c.unknown(data, ("a",), base)
        a = c.number(data, "a", f"{base}.a")
        return None if a is None else FrankCoefficients.one_constant(a)
    c.unknown(data, ("k1", "k2", "k3"), base)
    ks = [c.number(data, k, f"{base}.{k}", required=True) for k in ("k1", "k2", "k3")]
    return None if None in ks else FrankCoefficients(*ks)


def _dataclass_section(c: _Collector, cls, data: dict, path: str, defaults=None):
    """Build a dataclass from a section, collecting type and constructor errors."""
    names = {f.name: f for f in fields(cls)}
    c.unknown(data, names, path)
    kwargs = {}
    for key, value in data.items():
        if key not in names:
            continue
        default = getattr(defaults, key) if defaults is not None else None
        if isinstance(default, bool):
            if not isinstance(value, bool):
                c.add(f"{path}.{key}", "must be true or false")
                continue
        elif isinstance(default, (int, float)) and not isinstance(default, bool):
            got = c.number(data, key, f"{path}.{key}", integer=isinstance(default, int))
            if got is None:
                continue
            value = got
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        msg = str(exc)
        first = msg.split()[0] if msg else ""
        c.add(f"{path}.{first}" if first in names else path, msg)
        return None


def _read_initial(c: _Collector, data: dict):
    path = "initial_data"
    spec = _dataclass_section(c, InitialDataSpec, {k: v for k, v in data.items() if k != "director"},
                              path, InitialDataSpec())
    if spec is None:
        return None
    if spec.generator not in GENERATORS:
        c.add(f"{path}.generator", f"unknown generator {spec.generator!r}; "
                                   f"choose from {sorted(GENERATORS)}")
    if "director" in data:
        vec = data["director"]
        ok = (isinstance(vec, list) and len(vec) == 3
              and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in vec))
        if not ok or not any(vec):
            c.add(f"{path}.director", "must be a non-zero list of three numbers")
        else:
            spec = replace(spec, director=tuple(float(x) for x in vec))
    if spec.cutoff < 0:
        c.add(f"{path}.cutoff", "must be >= 0")
    if spec.amplitude < 0:
        c.add(f"{path}.amplitude", "must be >= 0")
    return spec


def _read_experiment(c: _Collector, data: dict):
    path = "experiment"
    c.unknown(data, ("mode", "twin", "sweep"), path)
    mode = data.get("mode", "simulate")
    if mode not in MODES:
        c.add(f"{path}.mode", f"must be one of {list(MODES)}")
    tw = c.section(data, "twin", f"{path}.twin")
    c.unknown(tw, ("epsilon", "epsilons", "target", "cutoff", "seed", "C_cap", "cap_factor",
                   "spread_tol"), f"{path}.twin")
    if "epsilon" in tw and "epsilons" in tw:
        c.add(f"{path}.twin", "give either epsilon or epsilons, not both")
    eps = tw.get("epsilons", [tw["epsilon"]] if "epsilon" in tw else [1e-4])
    if (not isinstance(eps, list) or not eps
            or not all(isinstance(e, (int, float)) and not isinstance(e, bool) and e >= 0 for e in eps)):
        c.add(f"{path}.twin.epsilons", "must be a non-empty list of non-negative numbers")
        eps = [1e-4]
    pert_kwargs = {k: tw[k] for k in ("target", "cutoff", "seed") if k in tw}
    try:
        pert = PerturbationSpec(epsilon=float(eps[0]), **pert_kwargs)
    except (TypeError, ValueError) as exc:
        c.add(f"{path}.twin", str(exc))
        pert = PerturbationSpec()
    cap = tw.get("C_cap")
    if cap is not None:
        cap = c.number(tw, "C_cap", f"{path}.twin.C_cap")
    factor = c.number(tw, "cap_factor", f"{path}.twin.cap_factor", default=10.0)
    spread = c.number(tw, "spread_tol", f"{path}.twin.spread_tol", default=0.25)
    if factor is not None and factor <= 0:
        c.add(f"{path}.twin.cap_factor", "must be > 0")
    twin = TwinSpec(tuple(float(e) for e in eps), pert, cap, factor or 10.0, spread or 0.25)

    sw = c.section(data, "sweep", f"{path}.sweep")
    c.unknown(sw, ("axis", "values", "relative_to_delta0", "mode"), f"{path}.sweep")
    axis = sw.get("axis", "delta")
    if axis not in SWEEP_AXES:
        c.add(f"{path}.sweep.axis", f"must be one of {list(SWEEP_AXES)}")
    values = sw.get("values", [])
    if not isinstance(values, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        c.add(f"{path}.sweep.values", "must be a list of numbers")
        values = []
    if mode == "sweep" and not values:
        c.add(f"{path}.sweep.values", "a sweep needs at least one value")
    if axis == "delta" and any(v < 0 for v in values):
        c.add(f"{path}.sweep.values", "delta values must be >= 0")
    rel = sw.get("relative_to_delta0", False)
    if not isinstance(rel, bool):
        c.add(f"{path}.sweep.relative_to_delta0", "must be true or false")
        rel = False
    child_mode = sw.get("mode", "twin")
    if child_mode not in ("simulate", "twin", "identities"):
        c.add(f"{path}.sweep.mode", "must be one of ['simulate', 'twin', 'identities']")
    return mode, twin, SweepSpec(axis, tuple(values), rel, child_mode)


def config_from_dict(data: dict) -> RunConfig:
    """Validate a decoded configuration; raises ``ValidationError`` listing every problem."""
    c = _Collector()
    if not isinstance(data, dict):
        raise ValidationError([("", "top level must be an object")])
    c.unknown(data, ("grid", "coefficients", "solver", "initial_data", "outputs", "experiment",
                     "description"), "")

    g = c.section(data, "grid", "grid")
    c.unknown(g, ("n", "length"), "grid")
    n = c.number(g, "n", "grid.n", default=64, integer=True)
    length = c.number(g, "length", "grid.length", default=2 * math.pi)
    grid = GridSpec(n or 64, length or 2 * math.pi)
    try:
        grid.build()
    except ValueError as exc:
        c.add("grid", str(exc))

    co = c.section(data, "coefficients", "coefficients")
    c.unknown(co, ("leslie", "frank", "c0_abs"), "coefficients")
    if "leslie" not in co:
        c.add("coefficients.leslie", "required")
    if "frank" not in co:
        c.add("coefficients.frank", "required")
    leslie = _read_leslie(c, c.section(co, "leslie", "coefficients.leslie")) if "leslie" in co else None
    frank = _read_frank(c, c.section(co, "frank", "coefficients.frank")) if "frank" in co else None
    c0_abs = c.number(co, "c0_abs", "coefficients.c0_abs", default=1.0)
    if c0_abs is not None and c0_abs <= 0:
        c.add("coefficients.c0_abs", "must be > 0")
    if leslie is not None and frank is not None:
        try:
            report = validate(leslie, frank)
        except NonFinite as exc:
            c.add("coefficients", str(exc))
        else:
            for chk in report.failures:
                c.add(_CONSTRAINT_PATHS.get(chk.name, "coefficients"), chk.name)

    solver = _dataclass_section(c, SolverConfig, c.section(data, "solver", "solver"), "solver",
                                SolverConfig())
    initial = _read_initial(c, c.section(data, "initial_data", "initial_data"))
    if initial is not None and n and initial.cutoff >= n // 2:
        c.add("initial_data.cutoff", f"must be below n/2 = {n // 2}")
    outputs = _dataclass_section(c, OutputSpec, c.section(data, "outputs", "outputs"), "outputs",
                                 OutputSpec(out_dir=""))
    if outputs is not None:
        if outputs.report_every < 1:
            c.add("outputs.report_every", "must be >= 1")
        if outputs.checkpoint_every < 0:
            c.add("outputs.checkpoint_every", "must be >= 0")
    mode, twin, sweep = _read_experiment(c, c.section(data, "experiment", "experiment"))

    if c.errors:
        raise ValidationError(c.errors)
    return RunConfig(grid, leslie, frank, c0_abs, solver, initial, outputs, mode, twin, sweep,
                     raw=copy.deepcopy(data))


def parse_config(text: str) -> RunConfig:
    """Parse JSON text into a validated ``RunConfig``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return config_from_dict(data)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def reference_config_text() -> str:
    """The bundled one-constant reference configuration."""
    return resources.files("nematic2d").joinpath("data/reference.json").read_text(encoding="utf-8")


def reference_config() -> RunConfig:
    return parse_config(reference_config_text())


def with_delta(cfg: RunConfig, delta: float) -> RunConfig:
    """Same run with Frank constants ``(a, a + delta, a + delta)``, ``a`` kept from ``cfg``."""
    a = cfg.frank.a
    return replace(cfg, frank=FrankCoefficients(a, a + delta, a + delta))


def expand_sweep(cfg: RunConfig) -> list:
    """Child configurations, one per sweep value, all sharing the parent's seed.

    Returns ``(label, value, child)`` triples. For the ``delta`` axis with
    ``relative_to_delta0`` the values are multiples of ``delta0`` of the
    parent's coefficients.
    """
    sweep = cfg.sweep
    children = []
    d0 = cfg.delta0 if sweep.axis == "delta" and sweep.relative_to_delta0 else None
    for v in sweep.values:
        if sweep.axis == "delta":
            value = v * d0 if d0 is not None else float(v)
            child = with_delta(cfg, value)
        elif sweep.axis == "epsilon":
            value = float(v)
            child = replace(cfg, twin=replace(cfg.twin, epsilons=(value,)))
        elif sweep.axis == "dt":
            value = float(v)
            child = replace(cfg, solver=replace(cfg.solver, dt=value))
        else:  # seed: the one axis where children deliberately differ in seed
            value = int(v)
            child = replace(cfg, initial=replace(cfg.initial, seed=value))
        child = replace(child, mode=sweep.mode)
        children.append((f"{sweep.axis}={value:.6g}", value, child))
    return children
