"""Histograms of v_total per (L, T) with the GOE target marked."""

from __future__ import annotations

import sys

import numpy as np

from . import style
from .records import group_by_block, load_records, load_summary
from .spec import FigureConfigError, FigureSpec


def aggregate(records) -> list[dict]:
    table = []
    for (L, T), block in group_by_block(records).items():
        values = np.array([r.v_total for r in block])
        table.append({"L": L, "T": T, "R": len(block), "values": values})
    return table


def _resolve_sigma2(spec: FigureSpec) -> float:
    if spec.sigma2 is not None:
        return spec.sigma2
    if spec.summary_path is not None:
        rows = load_summary(spec.summary_path)["rows"]
        if rows:
            return float(rows[0]["sigma2_target"])
    raise FigureConfigError(
        "histogram needs the GOE target: pass --summary or --sigma2"
    )


def render(spec: FigureSpec) -> list[dict]:
    table = aggregate(load_records(spec.records_path))
    sigma2 = _resolve_sigma2(spec)
    fig, ax = style.new_axes("Distribution of the energy variance V")
    ax.set_xlabel("V")
    ax.set_ylabel("replicates")
    for row in table:
        ax.hist(
            row["values"], bins=40, histtype="step",
            label=f"L={row['L']:g}, T={row['T']:.2g} (R={row['R']})",
        )
    ax.axvline(
        sigma2, color=style.REFERENCE_COLOR, linestyle="--",
        label=f"GOE target {sigma2:g}",
    )
    ax.legend(loc="upper right")
    style.save(fig, spec.out_path)
    return table


def main(argv=None) -> int:
    from ._cli import run_kind

    return run_kind("histogram", __doc__, argv)


if __name__ == "__main__":
    sys.exit(main())
