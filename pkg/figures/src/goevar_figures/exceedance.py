"""Empirical exceedance probability P(|V - target| > eps) against L."""

from __future__ import annotations

import sys

import numpy as np

from . import style
from .records import group_by_block, load_records
from .spec import FigureSpec


def aggregate(records, eps: float) -> list[dict]:
    table = []
    for (L, T), block in group_by_block(records).items():
        devs = np.array([r.abs_dev for r in block])
        table.append(
            {
                "L": L,
                "T": T,
                "R": len(block),
                "prob_dev_gt_eps": float(np.mean(devs > eps)),
            }
        )
    return table


def render(spec: FigureSpec) -> list[dict]:
    table = aggregate(load_records(spec.records_path), spec.eps)
    fig, ax = style.new_axes(f"Exceedance probability, eps = {spec.eps:g}")
    ax.set_xlabel("window length L")
    ax.set_ylabel(f"P(|V - target| > {spec.eps:g})")
    ax.set_ylim(-0.02, 1.02)
    ax.axhline(
        0.05, color=style.REFERENCE_COLOR, linestyle="--", label="5% level"
    )
    if table:
        ls = [row["L"] for row in table]
        probs = [row["prob_dev_gt_eps"] for row in table]
        ax.plot(ls, probs, "s-", color=style.MC_COLOR, label="empirical probability")
    ax.legend(loc="center right")
    style.save(fig, spec.out_path)
    return table


def main(argv=None) -> int:
    from ._cli import run_kind

    return run_kind("exceedance", __doc__, argv)


if __name__ == "__main__":
    sys.exit(main())
