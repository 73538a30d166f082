"""Optional figures for CLI runs. Each function writes one PNG and returns
its path; matplotlib is imported lazily with the Agg backend."""

from __future__ import annotations

import os

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams.update({"font.size": 9, "axes.spines.top": False, "axes.spines.right": False})
    return plt


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    import matplotlib.pyplot as plt

    plt.close(fig)
    return os.fspath(path)


def plot_spectrum(lines, path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(4, 3))
    sc = [ln for ln in lines if ln.sector == "semiclassical"]
    cl = [ln for ln in lines if ln.sector == "classical"]
    ax.plot([ln.index for ln in sc], [ln.value for ln in sc], "o", label="levels")
    if cl:
        ax.plot([ln.index for ln in cl], [ln.value for ln in cl], "s", mfc="none", label="classical")
    ax.set_xlabel("n or nu")
    ax.set_ylabel("E or frequency")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_config(x, values, path, reference=None, title=None):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.plot(x, np.real(values), lw=1.2, label="Re")
    if np.any(np.abs(np.imag(values)) > 0):
        ax.plot(x, np.imag(values), lw=1.0, ls="--", label="Im")
    if reference is not None:
        ax.plot(x, np.real(reference), lw=0.8, color="k", alpha=0.6, label="exact")
    ax.set_xlabel("x")
    ax.set_ylabel("psi")
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_phase_grid(grid, path, title=None):
    plt = _pyplot()
    fig, axes = plt.subplots(1, 2, figsize=(8, 3.4))
    ext = (grid.x_axis[0], grid.x_axis[-1], grid.p_axis[0], grid.p_axis[-1])
    im = axes[0].imshow(np.abs(grid.values).T, origin="lower", extent=ext, aspect="auto", cmap="magma")
    fig.colorbar(im, ax=axes[0], label="|psi|")
    phase = np.where(np.abs(grid.values) > 1e-3 * np.max(np.abs(grid.values)), np.angle(grid.values), np.nan)
    im = axes[1].imshow(phase.T, origin="lower", extent=ext, aspect="auto", cmap="twilight")
    fig.colorbar(im, ax=axes[1], label="arg psi")
    for ax in axes:
        ax.set_xlabel("x")
        ax.set_ylabel("p")
    if title:
        fig.suptitle(title)
    return _save(fig, path)


def plot_density(report, path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.plot(report.x_axis, report.integral_delta_f_per_x, label="1")
    for name in ("x", "p2"):
        if name in report.weighted_integrals:
            ax.plot(report.x_axis, report.weighted_integrals[name], lw=0.8, label=name)
    ax.set_xlabel("x")
    ax.set_ylabel("integral of g delta f dp")
    ax.legend(frameon=False, title="g")
    return _save(fig, path)
