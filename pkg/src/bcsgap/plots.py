"""Static SVG figures for the report command.

Output is deterministic: a fixed hash salt and no date metadata, so repeated
runs write byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "svg.hashsalt": "bcsgap",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "legend.frameon": False,
    "lines.linewidth": 1.3,
    "figure.figsize": (4.8, 3.2),
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_gap_profiles(grid, temperatures, profiles, path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        cmap = plt.get_cmap("viridis")
        n = max(len(temperatures) - 1, 1)
        for k, (T, u) in enumerate(zip(temperatures, profiles)):
            ax.plot(grid.nodes, u, color=cmap(k / n), label=f"T = {T:.4g}")
        ax.set_xlabel(r"energy $\xi$")
        ax.set_ylabel(r"gap $u_0(T, \xi)$")
        if len(temperatures) <= 10:
            ax.legend(loc="best")
        return _save(fig, Path(path))


def plot_entropy(points, path) -> Path:
    T = np.array([p.temperature for p in points])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(T, [p.entropy_formula for p in points], "o-", label="derivative formula")
        ax.plot(T, [p.entropy_fd for p in points], "x--", label=r"$-d\Omega/dT$")
        ax.set_xlabel("temperature $T$")
        ax.set_ylabel("entropy $S$")
        ax.legend(loc="best")
        return _save(fig, Path(path))


def plot_specific_heat(points, path, cv_normal=None) -> Path:
    T = np.array([p.temperature for p in points])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(T, [p.cv_fd for p in points], "o-", label="superconducting")
        if cv_normal is not None:
            ax.plot(T, cv_normal, ":", color="0.4", label="normal")
        ax.set_xlabel("temperature $T$")
        ax.set_ylabel("specific heat $C_V$")
        ax.legend(loc="best")
        return _save(fig, Path(path))


def plot_asymptotics(reports, delta, path) -> Path:
    x = np.array([delta / r.temperature for r in reports])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.semilogy(x, [r.s_full for r in reports], "o", color="C0", label="S numerics")
        ax.semilogy(x, [r.s_lowT for r in reports], "-", color="C0", label="S low-T form")
        ax.semilogy(x, [r.cv_full for r in reports], "s", color="C1", label="$C_V$ numerics")
        ax.semilogy(x, [r.cv_lowT for r in reports], "-", color="C1", label="$C_V$ low-T form")
        ax.set_xlabel(r"$u_0(0) / T$")
        ax.legend(loc="best")
        return _save(fig, Path(path))
