"""Deterministic figure style shared by every script."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

RC = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 11,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "lines.markersize": 5,
    "svg.hashsalt": "goevar",
}

REFERENCE_COLOR = "#b2182b"
MC_COLOR = "#2166ac"
ORACLE_COLOR = "#4dac26"


def new_axes(title: str):
    plt.rcdefaults()
    matplotlib.rcParams.update(RC)
    fig, ax = plt.subplots()
    ax.set_title(title)
    return fig, ax


def save(fig, out_path) -> None:
    # Drop the version-carrying Software chunk so output is metadata-stable.
    fig.savefig(out_path, metadata={"Software": None})
    plt.close(fig)
