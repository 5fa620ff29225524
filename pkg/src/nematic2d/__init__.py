"""Pseudo-spectral simulator for 2D Ericksen-Leslie nematic flow on the periodic square.

The package covers coefficient validation, Fourier calculus, the Oseen-Frank
energy and molecular field, Leslie stresses, IMEX time stepping, twin-run
stability diagnostics and a small command-line harness.
"""

from .coeffs import (DerivedConstants, FrankCoefficients, LeslieCoefficients, ValidationReport,
                     delta0, derive, mu_floor, validate)
from .config import RunConfig, load_config, parse_config, reference_config
from .diagnostics import (PerturbationSpec, TwinSeries, fit_gronwall, gronwall_integrand,
                          identity_suite, lower_order_energy, twin_experiment)
from .dynamics import Integrator, SolverConfig, StepReport, momentum_rhs, run, step
from .errors import NematicError
from .initial import InitialDataSpec, generate_initial
from .oseen_frank import ericksen_stress, frank_density, molecular_field
from .spectral import Grid, State

__version__ = "0.1.0"

__all__ = [
    "DerivedConstants", "FrankCoefficients", "LeslieCoefficients", "ValidationReport",
    "delta0", "derive", "mu_floor", "validate",
    "RunConfig", "load_config", "parse_config", "reference_config",
    "PerturbationSpec", "TwinSeries", "fit_gronwall", "gronwall_integrand", "identity_suite",
    "lower_order_energy", "twin_experiment",
    "Integrator", "SolverConfig", "StepReport", "momentum_rhs", "run", "step",
    "NematicError", "InitialDataSpec", "generate_initial",
    "ericksen_stress", "frank_density", "molecular_field", "Grid", "State",
]
