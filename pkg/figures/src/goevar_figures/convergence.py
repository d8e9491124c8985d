"""Mean |v_total - target| against the window length L, log scale."""

from __future__ import annotations

import sys

import numpy as np

from . import style
from .records import group_by_block, load_records
from .spec import FigureSpec


def aggregate(records) -> list[dict]:
    """Per (L, T): replicate count and mean absolute deviation."""
    table = []
    for (L, T), block in group_by_block(records).items():
        devs = np.array([r.abs_dev for r in block])
        table.append(
            {"L": L, "T": T, "R": len(block), "mean_abs_dev": float(devs.mean())}
        )
    return table


def render(spec: FigureSpec) -> list[dict]:
    table = aggregate(load_records(spec.records_path))
    fig, ax = style.new_axes("Energy-variance deviation from the GOE target")
    ax.set_xlabel("window length L")
    ax.set_ylabel("mean |V - target|")
    ax.set_yscale("log")
    ax.axhline(
        spec.eps, color=style.REFERENCE_COLOR, linestyle="--",
        label=f"deviation threshold {spec.eps:g}",
    )
    if table:
        ls = [row["L"] for row in table]
        means = [row["mean_abs_dev"] for row in table]
        ax.plot(ls, means, "o-", color=style.MC_COLOR, label="Monte Carlo mean")
        for row in table:
            ax.annotate(
                f"T={row['T']:.2g}", (row["L"], row["mean_abs_dev"]),
                textcoords="offset points", xytext=(4, 4), fontsize=7,
            )
    ax.legend(loc="upper right")
    style.save(fig, spec.out_path)
    return table


def main(argv=None) -> int:
    from ._cli import run_kind

    return run_kind("convergence", __doc__, argv)


if __name__ == "__main__":
    sys.exit(main())
