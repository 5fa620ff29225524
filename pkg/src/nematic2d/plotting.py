"""SVG figures rendered from emitted CSV series; no simulation state is touched."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .checkpoint import read_csv  # noqa: E402

# fixed metadata keeps repeated renders byte-identical
_SVG_META = {"Date": None}
plt.rcParams["svg.hashsalt"] = "nematic2d"


def _save(fig, path) -> str:
    os.makedirs(os.path.dirname(os.fspath(path)) or ".", exist_ok=True)
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
    return os.fspath(path)


def plot_energy(csv_path, svg_path) -> str:
    """Kinetic, elastic and total energy, plus the per-step energy-balance residual."""
    cols = read_csv(csv_path)
    t = cols["t"]
    fig, (ax, ax_res) = plt.subplots(2, 1, figsize=(6.4, 6.0), sharex=True)
    ax.plot(t, cols["E_kin"], label="kinetic")
    ax.plot(t, cols["E_elastic"], label="elastic")
    ax.plot(t, cols["E_kin"] + cols["E_elastic"], "k", lw=1.5, label="total")
    ax.set_ylabel("energy")
    ax.legend(frameon=False)
    res = np.abs(cols["energy_residual"][1:])
    ax_res.semilogy(t[1:], np.where(res > 0, res, np.nan), color="C3")
    ax_res.set_xlabel("t")
    ax_res.set_ylabel("|energy residual|")
    fig.tight_layout()
    return _save(fig, svg_path)


def plot_twin(csv_paths, svg_path, labels=None) -> str:
    """``Phi(t)`` against ``Phi(0) exp(C_cap M(t))`` for one or more twin series."""
    if isinstance(csv_paths, (str, os.PathLike)):
        csv_paths = [csv_paths]
    labels = labels or [os.path.basename(os.path.dirname(os.fspath(p))) or os.fspath(p)
                        for p in csv_paths]
    fig, (ax, ax_r) = plt.subplots(1, 2, figsize=(10.0, 4.0))
    for i, (path, label) in enumerate(zip(csv_paths, labels)):
        cols = read_csv(path)
        t, phi, bound = cols["t"], cols["phi"], cols["gronwall_bound"]
        color = f"C{i % 10}"
        ax.semilogy(t, np.where(phi > 0, phi, np.nan), color=color, label=f"Phi {label}")
        ax.semilogy(t, np.where(bound > 0, bound, np.nan), color=color, ls="--", lw=0.8)
        if phi[0] > 0:
            ax_r.plot(t, np.log(np.where(phi > 0, phi, np.nan) / phi[0]), color=color, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("Phi (solid), Gronwall bound (dashed)")
    ax.legend(frameon=False, fontsize="small")
    ax_r.set_xlabel("t")
    ax_r.set_ylabel("log(Phi / Phi(0))")
    if ax_r.lines:
        ax_r.legend(frameon=False, fontsize="small")
    fig.tight_layout()
    return _save(fig, svg_path)


def plot_csv(csv_path, svg_path) -> str:
    """Pick the figure from the CSV header: step reports or a twin series."""
    with open(csv_path) as fh:
        header = fh.readline().strip().split(",")
    if "energy_residual" in header:
        return plot_energy(csv_path, svg_path)
    if "phi" in header:
        return plot_twin([csv_path], svg_path)
    raise ValueError(f"{csv_path}: not a step-report or twin CSV (columns {header})")
