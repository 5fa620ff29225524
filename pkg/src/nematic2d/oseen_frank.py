"""Oseen-Frank elastic energy, its variational derivatives, the molecular field and the Ericksen stress.

The model density is the split form ``W = a |grad d|^2 + V`` with
``a = min k_i`` and ``V`` collecting the splay/twist/bend excesses over ``a``.
It differs from the raw three-term Frank density by ``2a det(grad d_hat)``
(for unit ``d``), a null Lagrangian: both have the same integral on the
torus, the same molecular field, and Ericksen stresses whose divergences
differ by a gradient.

Derivatives of ``W`` with respect to ``grad d`` and ``d`` are taken by central
differences in those arguments. ``W`` is a quadratic form in each argument
separately, so a central difference with any step is exact up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coeffs import FrankCoefficients
from .errors import ConsistencyFailure, UnnormalizedDirector
from .spectral import Grid, curl_from_gradient, divergence, gradient, integrate, laplacian

#: accepted deviation of |d| from 1 for director inputs
UNIT_TOL = 1e-6


def check_unit(d: np.ndarray, tol: float = UNIT_TOL) -> float:
    drift = float(np.abs(np.sqrt(np.sum(d ** 2, axis=0)) - 1.0).max())
    if not drift <= tol:
        raise UnnormalizedDirector(f"max | |d| - 1 | = {drift:.3e} exceeds {tol:.1e}")
    return drift


def frank_terms(d: np.ndarray, g: np.ndarray) -> tuple:
    """Pointwise ``(div d)^2``, ``(d . curl d)^2`` and ``|d x curl d|^2``.

    ``d`` has shape ``(3, ...)`` and ``g[m, j] = d_j d^m`` has shape ``(3, 2, ...)``.
    """
    div = g[0, 0] + g[1, 1]
    curl = curl_from_gradient(g)
    twist = np.sum(d * curl, axis=0)
    # d x curl d by components; np.cross is slow with the vector axis first
    b1 = d[1] * curl[2] - d[2] * curl[1]
    b2 = d[2] * curl[0] - d[0] * curl[2]
    b3 = d[0] * curl[1] - d[1] * curl[0]
    return div ** 2, twist ** 2, b1 ** 2 + b2 ** 2 + b3 ** 2


def anisotropic_density(d, g, frank: FrankCoefficients) -> np.ndarray:
    a = frank.a
    splay, twist, bend = frank_terms(d, g)
    return (frank.k1 - a) * splay + (frank.k2 - a) * twist + (frank.k3 - a) * bend


def model_density(d, g, frank: FrankCoefficients) -> np.ndarray:
    return frank.a * np.sum(g ** 2, axis=(0, 1)) + anisotropic_density(d, g, frank)


@dataclass
class EnergyDensityBreakdown:
    total: np.ndarray
    isotropic: np.ndarray
    anisotropic: np.ndarray
    splay: np.ndarray
    twist: np.ndarray
    bend: np.ndarray
    frank: np.ndarray
    grid: Grid

    @property
    def total_integral(self) -> float:
        return integrate(self.total, self.grid)

    @property
    def isotropic_integral(self) -> float:
        return integrate(self.isotropic, self.grid)

    @property
    def anisotropic_integral(self) -> float:
        return integrate(self.anisotropic, self.grid)

    @property
    def frank_integral(self) -> float:
        return integrate(self.frank, self.grid)


def frank_density(d: np.ndarray, frank: FrankCoefficients, grid: Grid) -> EnergyDensityBreakdown:
    """Pointwise energy density in split form, plus the raw three-term Frank density.

    ``splay``, ``twist`` and ``bend`` are the three contributions to ``V``
    (already weighted by ``k_i - a``).
    """
    grid.check(d)
    check_unit(d)
    g = gradient(d, grid)
    a = frank.a
    s, t, b = frank_terms(d, g)
    splay, twist, bend = (frank.k1 - a) * s, (frank.k2 - a) * t, (frank.k3 - a) * b
    iso = a * np.sum(g ** 2, axis=(0, 1))
    V = splay + twist + bend
    return EnergyDensityBreakdown(
        total=iso + V, isotropic=iso, anisotropic=V, splay=splay, twist=twist, bend=bend,
        frank=frank.k1 * s + frank.k2 * t + frank.k3 * b, grid=grid)


def _central_derivatives(density, d, g):
    """Partial derivatives of ``density(d, g)`` in every entry of ``g`` and of ``d``."""
    step = 1.0 + max(float(np.abs(g).max()), float(np.abs(d).max()))
    dg = np.empty_like(g)
    for m in range(3):
        for j in range(2):
            gp = g.copy()
            gm = g.copy()
            gp[m, j] += step
            gm[m, j] -= step
            dg[m, j] = (density(d, gp) - density(d, gm)) / (2 * step)
    dd = np.empty_like(d)
    for m in range(3):
        dp = d.copy()
        dm = d.copy()
        dp[m] += step
        dm[m] -= step
        dd[m] = (density(dp, g) - density(dm, g)) / (2 * step)
    return dg, dd


@dataclass
class VariationalDerivatives:
    dW_dgrad: np.ndarray  # (3, 2, n, n), entry [m, j] = dW / d(d_j d^m)
    dW_dd: np.ndarray     # (3, n, n)
    dV_dgrad: np.ndarray
    dV_dd: np.ndarray


def pointwise_derivatives(d, g, frank: FrankCoefficients) -> VariationalDerivatives:
    """Derivatives of ``W`` and ``V`` at given pointwise values of ``d`` and ``grad d``."""
    dW = _central_derivatives(lambda x, y: model_density(x, y, frank), d, g)
    dV = _central_derivatives(lambda x, y: anisotropic_density(x, y, frank), d, g)
    return VariationalDerivatives(dW[0], dW[1], dV[0], dV[1])


def anisotropic_derivatives(d, g, frank: FrankCoefficients) -> tuple:
    """``(dV/d grad d, dV/dd)``; exact zeros in the one-constant case."""
    if frank.delta == 0:
        return np.zeros_like(g), np.zeros_like(d)
    return _central_derivatives(lambda x, y: anisotropic_density(x, y, frank), d, g)


def variational_derivatives(d: np.ndarray, frank: FrankCoefficients, grid: Grid) -> VariationalDerivatives:
    grid.check(d)
    check_unit(d)
    return pointwise_derivatives(d, gradient(d, grid), frank)


def anisotropic_field(d, frank, grid, dealias=False, derivs=None) -> np.ndarray:
    """``H = div(dV/d grad d) - dV/dd``."""
    if derivs is None:
        derivs = pointwise_derivatives(d, gradient(d, grid), frank)
    return divergence(derivs.dV_dgrad, grid, dealias=dealias) - derivs.dV_dd


@dataclass
class MolecularField:
    h: np.ndarray           # 2a lap d + H
    H: np.ndarray
    h_proj: np.ndarray      # h - (d.h) d
    h_direct: np.ndarray    # div(dW/d grad d) - dW/dd
    h_proj_alt: np.ndarray  # 2a(lap d + |grad d|^2 d) + H - (d.H) d
    h_residual: float       # relative disagreement of h and h_direct
    h_proj_residual: float  # relative disagreement of h_proj and h_proj_alt


def _rel(a, b) -> float:
    num = float(np.sqrt(np.sum((a - b) ** 2)))
    den = float(np.sqrt(np.sum(a ** 2)) + np.sqrt(np.sum(b ** 2)))
    return 0.0 if num == 0.0 else num / den


def molecular_field(d: np.ndarray, frank: FrankCoefficients, grid: Grid,
                    consistency_tol: float = 1e-6) -> MolecularField:
    """Molecular field computed two ways, with its projection orthogonal to ``d``.

    Raises ``ConsistencyFailure`` when the direct and split evaluations of
    ``h`` disagree by more than ``consistency_tol`` (relative).
    """
    grid.check(d)
    check_unit(d)
    g = gradient(d, grid)
    derivs = pointwise_derivatives(d, g, frank)
    a = frank.a
    lap = laplacian(d, grid)
    H = anisotropic_field(d, frank, grid, derivs=derivs)
    h = 2 * a * lap + H
    h_direct = divergence(derivs.dW_dgrad, grid) - derivs.dW_dd
    h_res = _rel(h, h_direct)
    if h_res > consistency_tol:
        raise ConsistencyFailure(
            f"molecular field: split and direct forms differ by {h_res:.3e} (relative)")
    h_proj = h - np.sum(d * h, axis=0) * d
    grad_sq = np.sum(g ** 2, axis=(0, 1))
    h_proj_alt = 2 * a * (lap + grad_sq * d) + H - np.sum(d * H, axis=0) * d
    return MolecularField(h, H, h_proj, h_direct, h_proj_alt, h_res, _rel(h_proj, h_proj_alt))


def ericksen_from(g: np.ndarray, dW_dgrad: np.ndarray) -> np.ndarray:
    """``sigma_ij = - sum_m d_i d^m * dW/d(d_j d^m)``: row index from ``(grad d)^T``."""
    return -np.einsum("mi...,mj...->ij...", g, dW_dgrad)


def ericksen_stress(d: np.ndarray, frank: FrankCoefficients, grid: Grid) -> np.ndarray:
    grid.check(d)
    check_unit(d)
    g = gradient(d, grid)
    return ericksen_from(g, pointwise_derivatives(d, g, frank).dW_dgrad)
