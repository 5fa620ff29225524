"""Initial-data generators: smooth periodic stand-ins for admissible Cauchy data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownGenerator
from .spectral import Grid, State, leray_project


@dataclass(frozen=True)
class InitialDataSpec:
    generator: str = "random_smooth"
    amplitude: float = 0.5      # velocity amplitude (max |u| for random_smooth)
    cutoff: int = 3             # highest integer wavenumber per axis kept
    seed: int = 0
    tilt: float = 0.5           # director angular amplitude (radians) for random_smooth
    director: tuple = (1.0, 0.0, 0.0)

    @classmethod
    def from_dict(cls, data: dict) -> "InitialDataSpec":
        kwargs = dict(data)
        if "director" in kwargs:
            kwargs["director"] = tuple(float(x) for x in kwargs["director"])
        return cls(**kwargs)


def _reference_grid(cutoff: int, length: float) -> Grid:
    """Fixed sampling used for max-norm scaling, so scaling does not depend on the run's grid."""
    return Grid(max(64, 4 * (cutoff + 1)), length)


def _draw_modes(ncomp: int, cutoff: int, rng: np.random.Generator) -> np.ndarray:
    mx = np.arange(-cutoff, cutoff + 1)[:, None]
    my = np.arange(cutoff + 1)[None, :]
    weight = ((mx != 0) | (my != 0)) / (1.0 + mx ** 2 + my ** 2)
    shape = (ncomp,) + weight.shape
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * weight


def _synthesize(draw: np.ndarray, grid: Grid) -> np.ndarray:
    n = grid.n
    cutoff = draw.shape[-1] - 1
    if not 0 <= cutoff < n // 2:
        raise ValueError(f"cutoff {cutoff} not resolved on an n={n} grid")
    coef = np.zeros((draw.shape[0], n, n // 2 + 1), dtype=complex)
    # unnormalised forward transform: scale by n^2 so the function does not depend on n
    coef[:, np.arange(-cutoff, cutoff + 1) % n, :cutoff + 1] = draw * (n * n)
    return grid.ifft(coef)


def _peak(f: np.ndarray) -> np.ndarray:
    peak = np.abs(f).reshape(f.shape[0], -1).max(axis=1)
    return np.where(peak > 0, peak, 1.0)


def random_band_limited(grid: Grid, ncomp: int, cutoff: int, rng: np.random.Generator) -> np.ndarray:
    """Real random trigonometric polynomial with integer modes ``|m_x|, |m_y| <= cutoff``.

    Coefficients decay like ``1/(1+|m|^2)``; each component is scaled to unit
    max-norm, measured on a fixed reference sampling. Only the retained modes
    are drawn, so the same seed gives the same polynomial on every grid that
    resolves it (``cutoff < n/2``).
    """
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    draw = _draw_modes(ncomp, cutoff, rng)
    peak = _peak(_synthesize(draw, _reference_grid(cutoff, grid.length)))
    return _synthesize(draw, grid) / peak[:, None, None]


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def constant_director(spec: InitialDataSpec, grid: Grid) -> State:
    n = grid.n
    d = np.broadcast_to(_unit(spec.director)[:, None, None], (3, n, n)).copy()
    return State(np.zeros((2, n, n)), d, 0.0, grid)


def twist_profile(spec: InitialDataSpec, grid: Grid) -> State:
    """In-plane rotating director ``(cos kx, sin kx, 0)`` with the fundamental wavenumber, at rest."""
    x, _ = grid.coords
    k = 2 * np.pi / grid.length
    d = np.stack([np.cos(k * x), np.sin(k * x), np.zeros_like(x)])
    return State(np.zeros((2, grid.n, grid.n)), d, 0.0, grid)


def director_from_angles(theta, phi) -> np.ndarray:
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def random_smooth(spec: InitialDataSpec, grid: Grid) -> State:
    """Divergence-free band-limited velocity and a smooth director tilted about ``e_x``.

    The director is built from band-limited polar/azimuthal angle fields so it
    is exactly unit length and has a non-trivial out-of-plane component.
    """
    rng = np.random.default_rng(spec.seed)
    ref = _reference_grid(spec.cutoff, grid.length)
    w = random_band_limited(grid, 2, spec.cutoff, rng)
    w_ref = random_band_limited(ref, 2, spec.cutoff, np.random.default_rng(spec.seed))
    u = leray_project(w, grid)
    peak = np.sqrt(np.sum(leray_project(w_ref, ref) ** 2, axis=0)).max()
    u = spec.amplitude * u / peak if peak > 0 else u
    ang = random_band_limited(grid, 2, spec.cutoff, rng)
    d = director_from_angles(np.pi / 2 + spec.tilt * ang[0], spec.tilt * ang[1])
    return State(u, d, 0.0, grid)


def taylor_green_u(spec: InitialDataSpec, grid: Grid) -> State:
    """Taylor-Green vortex of the given amplitude with a constant director."""
    x, y = grid.coords
    k = 2 * np.pi / grid.length
    u = spec.amplitude * np.stack([np.sin(k * x) * np.cos(k * y), -np.cos(k * x) * np.sin(k * y)])
    state = constant_director(spec, grid)
    state.u = u
    return state


GENERATORS = {
    "constant_director": constant_director,
    "twist_profile": twist_profile,
    "random_smooth": random_smooth,
    "taylor_green_u": taylor_green_u,
}


def generate_initial(spec: InitialDataSpec, grid: Grid) -> State:
    try:
        gen = GENERATORS[spec.generator]
    except KeyError:
        raise UnknownGenerator(
            f"unknown generator {spec.generator!r}; choose from {sorted(GENERATORS)}") from None
    return gen(spec, grid)
