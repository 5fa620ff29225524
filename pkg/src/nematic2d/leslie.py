"""Leslie stress in co-rotational form and in the split form that needs no time derivative of d.

Also holds the director-equation right-hand side and the pointwise algebra
behind the twin-run estimate (dissipation form, contraction formula,
difference remainders and their bounds).

Pointwise kernels accept arrays whose leading axes are components
(``(2,)`` for planar vectors, ``(2, 2)`` for tensors, ``(3,)`` for
directors) followed by any sample shape, so the same code serves grid
fields and batches of random samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coeffs import DerivedConstants, FrankCoefficients, LeslieCoefficients
from .errors import GridMismatch
from .oseen_frank import check_unit, molecular_field
from .spectral import Grid, advect, gradient, laplacian, relative_residual, sym_skew

SYM_TOL = 1e-10


def outer(a, b):
    return np.einsum("i...,j...->ij...", a, b)


def ddot(A, B):
    """Full contraction ``A : B``."""
    return np.einsum("ij...,ij...->...", A, B)


def matvec(A, v):
    return np.einsum("ij...,j...->i...", A, v)


def frob(A):
    return np.sqrt(ddot(A, A))


def split(M):
    Mt = np.swapaxes(M, 0, 1)
    return 0.5 * (M + Mt), 0.5 * (M - Mt)


# -- dissipation form ----------------------------------------------------------

def quadratic_form_Q(d_hat, A, leslie: LeslieCoefficients):
    """``(mu1 - l2^2/l1)(d.A.d)^2 + mu4 |A|^2 + (mu5 + mu6 + l2^2/l1)|A.d|^2``.

    ``A`` must be symmetric and trace free (tolerance ``SYM_TOL``).
    """
    A = np.asarray(A, dtype=float)
    d_hat = np.asarray(d_hat, dtype=float)
    scale = 1.0 + float(np.abs(A).max()) if A.size else 1.0
    if np.abs(A - np.swapaxes(A, 0, 1)).max(initial=0.0) > SYM_TOL * scale:
        raise ValueError("NotSymmetric: A must be symmetric")
    if np.abs(A[0, 0] + A[1, 1]).max(initial=0.0) > SYM_TOL * scale:
        raise ValueError("NotTraceFree: A must be trace free")
    L = leslie
    q = L.lambda2 ** 2 / L.lambda1
    Ad = matvec(A, d_hat)
    dAd = np.sum(d_hat * Ad, axis=0)
    return (L.mu1 - q) * dAd ** 2 + L.mu4 * ddot(A, A) + (L.mu5 + L.mu6 + q) * np.sum(Ad ** 2, axis=0)


# -- stresses --------------------------------------------------------------------

def corotational_rate(u, d, dt_d, grid: Grid):
    """``N_hat = dt d_hat + (u.grad) d_hat - Omega . d_hat``."""
    _, Om = sym_skew(gradient(u, grid))
    d_hat = d[:2]
    return dt_d[:2] + advect(u, d_hat, grid) - matvec(Om, d_hat)


def leslie_from_rate(d_hat, A, N_hat, leslie: LeslieCoefficients):
    L = leslie
    Ad = matvec(A, d_hat)
    dd = outer(d_hat, d_hat)
    return (L.mu1 * ddot(dd, A) * dd + L.mu2 * outer(N_hat, d_hat) + L.mu3 * outer(d_hat, N_hat)
            + L.mu4 * A + L.mu5 * outer(Ad, d_hat) + L.mu6 * outer(d_hat, Ad))


def leslie_stress_original(u, d, dt_d, leslie: LeslieCoefficients, grid: Grid):
    """Leslie stress from the co-rotational director rate; ``dt_d`` is the full 3-vector rate."""
    grid.check(u, d, dt_d)
    A, _ = sym_skew(gradient(u, grid))
    return leslie_from_rate(d[:2], A, corotational_rate(u, d, dt_d, grid), leslie)


def sigma_main(d, A, lap_d, a, leslie: LeslieCoefficients):
    """Main part of the split Leslie stress, assembled term by term."""
    L = leslie
    r = L.lambda2 / L.lambda1
    d_hat, lap_hat = d[:2], lap_d[:2]
    Ad = matvec(A, d_hat)
    dd = outer(d_hat, d_hat)
    lap_dot_d = np.sum(lap_d * d, axis=0)
    return ((L.mu1 - L.lambda2 * r) * np.sum(d_hat * Ad, axis=0) * dd
            + L.mu4 * A
            + (L.mu5 - r * L.mu2) * outer(Ad, d_hat)
            + (L.mu6 - r * L.mu3) * outer(d_hat, Ad)
            - (2 * a / L.lambda1) * (L.mu2 * outer(lap_hat, d_hat) + L.mu3 * outer(d_hat, lap_hat))
            - (2 * a * L.lambda2 / L.lambda1) * lap_dot_d * dd)


def sigma_perturbation(d, H, leslie: LeslieCoefficients):
    """``-(1/l1)[mu2 H_hat (x) d_hat + mu3 d_hat (x) H_hat + l2 (d.H) d_hat (x) d_hat]``."""
    L = leslie
    d_hat, H_hat = d[:2], H[:2]
    dH = np.sum(d * H, axis=0)
    return -(L.mu2 * outer(H_hat, d_hat) + L.mu3 * outer(d_hat, H_hat)
             + L.lambda2 * dH * outer(d_hat, d_hat)) / L.lambda1


def abc_parts(d, A, lap_d, a, leslie: LeslieCoefficients):
    """The three groups of the main stress: A-linear part, lap-d-hat part, (lap d . d) part."""
    L = leslie
    r = L.lambda2 / L.lambda1
    d_hat = d[:2]
    Ad = matvec(A, d_hat)
    dd = outer(d_hat, d_hat)
    part_a = ((L.mu1 - L.lambda2 ** 2 / L.lambda1) * ddot(A, dd) * dd + L.mu4 * A
              + (L.mu5 - r * L.mu2) * outer(Ad, d_hat) + (L.mu6 - r * L.mu3) * outer(d_hat, Ad))
    part_b = -(2 * a / L.lambda1) * (L.mu2 * outer(lap_d[:2], d_hat) + L.mu3 * outer(d_hat, lap_d[:2]))
    part_c = -(2 * a * L.lambda2 / L.lambda1) * np.sum(lap_d * d, axis=0) * dd
    return part_a, part_b, part_c


@dataclass
class LeslieStressForms:
    sigmaL_original: np.ndarray
    SigmaL: np.ndarray
    PiL: np.ndarray
    A_part: np.ndarray
    B_part: np.ndarray
    C_part: np.ndarray

    @property
    def abc_residual(self) -> float:
        return relative_residual(self.SigmaL, self.A_part + self.B_part + self.C_part)

    @property
    def equivalence_residual(self) -> float:
        return relative_residual(self.sigmaL_original, self.SigmaL + self.PiL)


def leslie_stress_decomposed(u, d, frank: FrankCoefficients, leslie: LeslieCoefficients,
                             grid: Grid) -> LeslieStressForms:
    """Split Leslie stress, its A/B/C groups and, for comparison, the co-rotational form.

    The co-rotational form is fed the director rate from :func:`director_rhs`.
    """
    grid.check(u, d)
    check_unit(d)
    mf = molecular_field(d, frank, grid)
    A, _ = sym_skew(gradient(u, grid))
    lap_d = laplacian(d, grid)
    Sigma = sigma_main(d, A, lap_d, frank.a, leslie)
    Pi = sigma_perturbation(d, mf.H, leslie)
    pa, pb, pc = abc_parts(d, A, lap_d, frank.a, leslie)
    rhs = _director_rhs(u, d, mf.h_proj, leslie, grid)
    original = leslie_stress_original(u, d, rhs, leslie, grid)
    return LeslieStressForms(original, Sigma, Pi, pa, pb, pc)


def check_leslie_equivalence(u, d, frank, leslie, grid: Grid) -> float:
    """Relative L2 gap between the co-rotational Leslie stress and main + perturbation parts."""
    forms = leslie_stress_decomposed(u, d, frank, leslie, grid)
    diff = forms.sigmaL_original - forms.SigmaL - forms.PiL
    num = np.sqrt(np.sum(diff ** 2))
    den = np.sqrt(np.sum(forms.sigmaL_original ** 2)) + np.finfo(float).eps
    return float(num / den)


# -- contraction formula, remainders ---------------------------------------------

def contraction_SigmaL(d_hat, A, M, derived: DerivedConstants, lap_d_hat, lap_d_dot_d):
    """``Sigma : M`` evaluated through the symmetric/skew split of ``M``.

    ``(alpha Hm + beta Mm + mu4 A + C) : M_s + 2a lap_d_hat (x) d_hat : (r M_s - M_a)``
    with ``Hm = (d.A.d) d (x) d``, ``Mm = (A.d) (x) d`` and ``r = l2/l1``.
    """
    Ms, Ma = split(M)
    dd = outer(d_hat, d_hat)
    Hm = ddot(A, dd) * dd
    Mm = outer(matvec(A, d_hat), d_hat)
    a, r = derived.a, derived.ratio
    C = -2 * a * r * lap_d_dot_d * dd
    sym = derived.alpha * Hm + derived.beta * Mm + derived.mu4 * A + C
    return ddot(sym, Ms) + 2 * a * ddot(outer(lap_d_hat, d_hat), r * Ms - Ma)


@dataclass
class RemainderTerms:
    H_r: np.ndarray
    M_r: np.ndarray
    C_r: np.ndarray
    slack_H: np.ndarray   # bound minus |remainder|, pointwise
    slack_M: np.ndarray
    slack_C: np.ndarray
    bound_ok: bool


def remainder_terms(d1, d2, A2, lap_d2, derived: DerivedConstants, tol: float = 1e-12) -> RemainderTerms:
    """Remainders left when differences of the quadratic groups are linearised about state 1.

    Checks ``|H_r| <= 4|A2||d_hat|``, ``|M_r| <= 2|A2||d_hat|`` and
    ``|C_r| <= 6a|l2/l1||lap d2||d|`` with ``d = d1 - d2``, up to ``tol`` times
    the bound's natural scale.
    """
    check_unit(d1)
    check_unit(d2)
    h1, h2 = d1[:2], d2[:2]
    dd1, dd2 = outer(h1, h1), outer(h2, h2)
    H_r = ddot(A2, dd1) * dd1 - ddot(A2, dd2) * dd2
    M_r = outer(matvec(A2, h1), h1) - outer(matvec(A2, h2), h2)
    k = -2 * derived.a * derived.ratio
    C_r = k * (np.sum(lap_d2 * d1, axis=0) * dd1 - np.sum(lap_d2 * d2, axis=0) * dd2)
    diff = d1 - d2
    nd = np.sqrt(np.sum(diff ** 2, axis=0))
    ndh = np.sqrt(np.sum(diff[:2] ** 2, axis=0))
    nA = frob(A2)
    nlap = np.sqrt(np.sum(lap_d2 ** 2, axis=0))
    cbound = 6 * derived.a * abs(derived.ratio) * nlap
    slack_H = 4 * nA * ndh - frob(H_r) + tol * 4 * nA
    slack_M = 2 * nA * ndh - frob(M_r) + tol * 2 * nA
    slack_C = cbound * nd - frob(C_r) + tol * cbound
    ok = bool((slack_H >= 0).all() and (slack_M >= 0).all() and (slack_C >= 0).all())
    return RemainderTerms(H_r, M_r, C_r, slack_H, slack_M, slack_C, ok)


def difference_decompositions(d1, d2, A1, A2, lap_d1, lap_d2, derived: DerivedConstants) -> dict:
    """Residuals of the three difference decompositions (H-, M- and C-groups).

    Each group difference between states 1 and 2 is compared with its part
    linear in the differences ``A = A1 - A2`` / ``lap d = lap d1 - lap d2``
    plus the corresponding remainder.
    """
    rem = remainder_terms(d1, d2, A2, lap_d2, derived)
    h1, h2 = d1[:2], d2[:2]
    dd1, dd2 = outer(h1, h1), outer(h2, h2)
    A = A1 - A2
    k = -2 * derived.a * derived.ratio
    lhs_h = ddot(A1, dd1) * dd1 - ddot(A2, dd2) * dd2
    lhs_m = outer(matvec(A1, h1), h1) - outer(matvec(A2, h2), h2)
    lhs_c = k * (np.sum(lap_d1 * d1, axis=0) * dd1 - np.sum(lap_d2 * d2, axis=0) * dd2)
    return {
        "H-group difference": relative_residual(lhs_h, ddot(A, dd1) * dd1 + rem.H_r),
        "M-group difference": relative_residual(lhs_m, outer(matvec(A, h1), h1) + rem.M_r),
        "C-group difference": relative_residual(
            lhs_c, k * np.sum((lap_d1 - lap_d2) * d1, axis=0) * dd1 + rem.C_r),
    }


# -- director equation -------------------------------------------------------------

@dataclass
class DirectorRHS:
    rhs_hat: np.ndarray   # (2, n, n)
    rhs_3: np.ndarray     # (n, n)
    N_hat: np.ndarray     # (2, n, n)

    @property
    def full(self) -> np.ndarray:
        return np.concatenate([self.rhs_hat, self.rhs_3[None]])


def director_rate_terms(u, d, h_proj, leslie: LeslieCoefficients, grid: Grid):
    """Everything in the director equation except the transport term, as a 3-vector field.

    ``-(r A - Omega).d - (1/l1) h_proj + r (d.A.d) d`` with ``A.d = (A.d_hat, 0)``.
    """
    L = leslie
    r = L.lambda2 / L.lambda1
    A, Om = sym_skew(gradient(u, grid))
    d_hat = d[:2]
    rot = matvec(r * A - Om, d_hat)
    dAd = np.sum(d_hat * matvec(A, d_hat), axis=0)
    out = -h_proj / L.lambda1 + r * dAd * d
    out[:2] -= rot
    return out


def _director_rhs(u, d, h_proj, leslie, grid):
    return director_rate_terms(u, d, h_proj, leslie, grid) - advect(u, d, grid)


def director_rhs(u, d, frank: FrankCoefficients, leslie: LeslieCoefficients, grid: Grid) -> DirectorRHS:
    grid.check(u, d)
    if u.shape[0] != 2 or d.shape[0] != 3:
        raise GridMismatch("director_rhs needs u (2, n, n) and d (3, n, n)")
    mf = molecular_field(d, frank, grid)
    full = _director_rhs(u, d, mf.h_proj, leslie, grid)
    _, Om = sym_skew(gradient(u, grid))
    N_hat = full[:2] + advect(u, d[:2], grid) - matvec(Om, d[:2])
    return DirectorRHS(full[:2], full[2], N_hat)
