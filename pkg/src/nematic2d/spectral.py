"""Periodic grid, Fourier-symbol calculus and field norms.

Field layout conventions (all real ``numpy`` arrays, trailing axes ``(n, n)``
indexed ``[ix, iy]``):

* scalar field: ``(n, n)``
* planar vector field (u, xi): ``(2, n, n)``
* director field: ``(3, n, n)``
* 2x2 tensor field: ``(2, 2, n, n)``, entry ``[i, j]``
* gradient of a field with components ``c``: ``(c, 2, n, n)`` with entry
  ``[c, j] = d_j f^c``. For a velocity this is the Jacobian ``(grad u)_ij = d_j u^i``.

The odd-derivative symbol at the Nyquist frequency is zeroed, and the same
wavenumber vector is used by every operator so that ``div grad == laplacian``,
the Leray projector and the Helmholtz inverse are mutually exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GridMismatch


@dataclass(frozen=True)
class Grid:
    n: int
    length: float = 2 * np.pi

    def __post_init__(self):
        n = int(self.n)
        if n < 8 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 8, got {self.n}")
        if not self.length > 0:
            raise ValueError(f"grid length must be positive, got {self.length}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "length", float(self.length))

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def cell_area(self) -> float:
        return self.spacing ** 2

    @cached_property
    def coords(self) -> tuple:
        """``(x, y)`` arrays of shape ``(n, n)``."""
        x1 = np.arange(self.n) * self.spacing
        return tuple(np.meshgrid(x1, x1, indexing="ij"))

    @cached_property
    def wavenumbers(self) -> tuple:
        """Broadcastable ``(kx, ky)`` for the ``rfft2`` layout, Nyquist zeroed."""
        n = self.n
        scale = 2 * np.pi / self.length
        kx = np.fft.fftfreq(n, 1.0 / n)
        ky = np.fft.rfftfreq(n, 1.0 / n)
        kx[n // 2] = 0.0
        ky[-1] = 0.0
        return (scale * kx)[:, None], (scale * ky)[None, :]

    @cached_property
    def k2(self) -> np.ndarray:
        kx, ky = self.wavenumbers
        return kx ** 2 + ky ** 2

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: keep integer modes with ``|m| < n/3`` on each axis."""
        n = self.n
        mx = np.abs(np.fft.fftfreq(n, 1.0 / n))[:, None]
        my = np.abs(np.fft.rfftfreq(n, 1.0 / n))[None, :]
        return ((mx < n / 3) & (my < n / 3)).astype(float)

    def fft(self, f: np.ndarray) -> np.ndarray:
        return np.fft.rfft2(f, axes=(-2, -1))

    def ifft(self, fh: np.ndarray) -> np.ndarray:
        return np.fft.irfft2(fh, s=(self.n, self.n), axes=(-2, -1))

    def check(self, *arrays) -> None:
        for arr in arrays:
            if np.shape(arr)[-2:] != (self.n, self.n):
                raise GridMismatch(
                    f"field of shape {np.shape(arr)} is not on the {self.n}x{self.n} grid")


@dataclass
class State:
    u: np.ndarray
    d: np.ndarray
    t: float
    grid: Grid = field(repr=False)

    def __post_init__(self):
        self.grid.check(self.u, self.d)
        if self.u.shape[0] != 2 or self.d.shape[0] != 3:
            raise GridMismatch("state needs u of shape (2, n, n) and d of shape (3, n, n)")

    def copy(self) -> "State":
        return State(self.u.copy(), self.d.copy(), self.t, self.grid)


def same_grid(*states) -> Grid:
    grid = states[0].grid
    for s in states[1:]:
        if s.grid != grid:
            raise GridMismatch(f"states live on different grids: {grid} vs {s.grid}")
    return grid


# -- derivatives --------------------------------------------------------------

def _spectral_gradient(fh, grid):
    kx, ky = grid.wavenumbers
    return np.stack([1j * kx * fh, 1j * ky * fh], axis=-3)


def gradient(f: np.ndarray, grid: Grid, dealias: bool = False) -> np.ndarray:
    """Gradient of each component; a ``(2,)`` axis is inserted before the grid axes."""
    grid.check(f)
    fh = grid.fft(f)
    if dealias:
        fh = fh * grid.dealias_mask
    return grid.ifft(_spectral_gradient(fh, grid))


def divergence(v: np.ndarray, grid: Grid, dealias: bool = False) -> np.ndarray:
    """Contract the last component axis with the derivative: ``(div v)_... = d_j v[..., j]``.

    Works for vector fields ``(2, n, n)`` and row-wise for tensors ``(c, 2, n, n)``.
    """
    grid.check(v)
    if v.shape[-3] != 2:
        raise GridMismatch(f"divergence needs a trailing component axis of length 2, got {v.shape}")
    kx, ky = grid.wavenumbers
    vh = grid.fft(v)
    out = 1j * kx * vh[..., 0, :, :] + 1j * ky * vh[..., 1, :, :]
    if dealias:
        out = out * grid.dealias_mask
    return grid.ifft(out)


def laplacian(f: np.ndarray, grid: Grid, dealias: bool = False) -> np.ndarray:
    grid.check(f)
    out = -grid.k2 * grid.fft(f)
    if dealias:
        out = out * grid.dealias_mask
    return grid.ifft(out)


def hessian(f: np.ndarray, grid: Grid) -> np.ndarray:
    """All second derivatives: two ``(2,)`` axes inserted before the grid axes."""
    grid.check(f)
    g = _spectral_gradient(grid.fft(f), grid)
    return grid.ifft(_spectral_gradient(g, grid))


def curl3(d: np.ndarray, grid: Grid) -> np.ndarray:
    """Curl of a planar-dependent 3-vector field (no dependence on the third coordinate)."""
    g = gradient(d, grid)
    return curl_from_gradient(g)


def curl_from_gradient(g: np.ndarray) -> np.ndarray:
    """Curl given ``g[m, j] = d_j d^m`` with ``d_3 = 0``."""
    return np.stack([g[2, 1], -g[2, 0], g[1, 0] - g[0, 1]])


def advect(u: np.ndarray, f: np.ndarray, grid: Grid) -> np.ndarray:
    """``(u . grad) f`` for every component of ``f``."""
    g = gradient(f, grid)
    return g[..., 0, :, :] * u[0] + g[..., 1, :, :] * u[1]


# -- projections and the Helmholtz lift ----------------------------------------

def leray_project(v: np.ndarray, grid: Grid) -> np.ndarray:
    """Orthogonal projection of a planar vector field onto divergence-free fields."""
    grid.check(v)
    return grid.ifft(leray_project_spectral(grid.fft(v), grid))


def leray_project_spectral(vh: np.ndarray, grid: Grid) -> np.ndarray:
    kx, ky = grid.wavenumbers
    k2 = grid.k2
    inv = np.divide(1.0, k2, out=np.zeros_like(k2), where=k2 > 0)
    kdotv = (kx * vh[0] + ky * vh[1]) * inv
    return np.stack([vh[0] - kx * kdotv, vh[1] - ky * kdotv])


def helmholtz_inverse(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Solve ``(-lap + I) xi = u`` with periodic boundary conditions (symbol ``1/(1+|k|^2)``)."""
    grid.check(u)
    return grid.ifft(grid.fft(u) / (1.0 + grid.k2))


def helmholtz_forward(xi: np.ndarray, grid: Grid) -> np.ndarray:
    """Apply ``(-lap + I)``."""
    grid.check(xi)
    return grid.ifft(grid.fft(xi) * (1.0 + grid.k2))


def sym_skew(grad_v: np.ndarray) -> tuple:
    """Symmetric and skew parts of a ``(2, 2, ...)`` tensor field."""
    t = np.swapaxes(grad_v, 0, 1)
    return 0.5 * (grad_v + t), 0.5 * (grad_v - t)


# -- quadrature ----------------------------------------------------------------

def integrate(f: np.ndarray, grid: Grid) -> float:
    """Rectangle rule on the torus (spectrally exact for resolved trigonometric polynomials)."""
    return float(grid.cell_area * np.sum(f))


def pointwise_norm(f: np.ndarray) -> np.ndarray:
    """Euclidean/Frobenius magnitude over all component axes."""
    if f.ndim == 2:
        return np.abs(f)
    return np.sqrt(np.sum(f.reshape(-1, *f.shape[-2:]) ** 2, axis=0))


def sq_norm(f: np.ndarray, grid: Grid) -> float:
    """``||f||_2^2`` summed over components."""
    return integrate(np.sum(np.reshape(f, (-1, *f.shape[-2:])) ** 2, axis=0), grid)


def norms(f: np.ndarray, grid: Grid) -> dict:
    grid.check(f)
    mag = pointwise_norm(f)
    l2sq = integrate(mag ** 2, grid)
    grad_sq = sq_norm(gradient(f, grid), grid)
    return {
        "l2": np.sqrt(l2sq),
        "l4": integrate(mag ** 4, grid) ** 0.25,
        "h1": np.sqrt(l2sq + grad_sq),
        "linf": float(mag.max()),
    }


def max_divergence(u: np.ndarray, grid: Grid) -> float:
    return float(np.abs(divergence(u, grid)).max())


# -- identities of the Helmholtz lift ---------------------------------------------

@dataclass
class IdentityReport:
    rows: dict

    @property
    def worst(self) -> float:
        return max(self.rows.values())


def relative_residual(lhs, rhs, grid: Grid | None = None) -> float:
    """``||lhs - rhs|| / (||lhs|| + ||rhs||)`` with the convention 0/0 = 0."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    num = np.sqrt(np.sum((lhs - rhs) ** 2))
    den = np.sqrt(np.sum(lhs ** 2)) + np.sqrt(np.sum(rhs ** 2))
    if den == 0.0:
        return 0.0 if num == 0.0 else float("inf")
    return float(num / den)


def check_xi_identities(u: np.ndarray, grid: Grid) -> IdentityReport:
    """Residuals of the Helmholtz-lift identities for a divergence-free ``u``.

    With ``xi = (-lap + I)^{-1} u``, ``S``/``Q`` the symmetric/skew parts of
    ``grad xi`` and ``A``/``Omega`` those of ``grad u``:
    ``int |S|^2 = 1/2 int |grad xi|^2``, ``int |grad S|^2 = 1/2 int |grad^2 xi|^2``,
    ``A = -lap S + S`` and ``Omega = -lap Q + Q``.
    """
    xi = helmholtz_inverse(u, grid)
    S, Q = sym_skew(gradient(xi, grid))
    A, Om = sym_skew(gradient(u, grid))
    grad_xi_sq = sq_norm(gradient(xi, grid), grid)
    hess_xi_sq = sq_norm(hessian(xi, grid), grid)
    rows = {
        "int |S|^2 = 1/2 int |grad xi|^2":
            relative_residual(sq_norm(S, grid), 0.5 * grad_xi_sq),
        "int |grad S|^2 = 1/2 int |grad^2 xi|^2":
            relative_residual(sq_norm(gradient(S, grid), grid), 0.5 * hess_xi_sq),
        "A = -lap S + S": relative_residual(A, helmholtz_forward(S, grid)),
        "Omega = -lap Q + Q": relative_residual(Om, helmholtz_forward(Q, grid)),
    }
    return IdentityReport(rows)
