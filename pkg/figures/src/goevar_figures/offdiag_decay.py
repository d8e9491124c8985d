"""Off-diagonal decay in T: Monte Carlo means against the quadrature oracle."""

from __future__ import annotations

import sys

import numpy as np

from . import style
from .records import group_by_block, load_records, load_summary
from .spec import FigureConfigError, FigureSpec


def aggregate(records) -> list[dict]:
    """Per (L, T): mean |offdiag| over replicates."""
    table = []
    for (L, T), block in group_by_block(records).items():
        offs = np.array([abs(r.offdiag) for r in block])
        table.append(
            {"L": L, "T": T, "R": len(block), "mean_abs_offdiag": float(offs.mean())}
        )
    return table


def oracle_series(summary: dict) -> list[dict]:
    rows = []
    for row in summary["rows"]:
        if row.get("oracle_offdiag_abs") is not None:
            rows.append(
                {"L": row["L"], "T": row["T"], "oracle": float(row["oracle_offdiag_abs"])}
            )
    return sorted(rows, key=lambda r: (r["L"], r["T"]))


def render(spec: FigureSpec) -> list[dict]:
    if spec.summary_path is None:
        raise FigureConfigError("offdiag-decay needs --summary for the oracle overlay")
    table = aggregate(load_records(spec.records_path))
    oracle = oracle_series(load_summary(spec.summary_path))
    fig, ax = style.new_axes("Off-diagonal term: Monte Carlo vs oracle")
    ax.set_xlabel("energy-average scale T")
    ax.set_ylabel("mean |off-diagonal|")
    ax.set_xscale("log")
    ax.set_yscale("log")
    if table:
        ax.plot(
            [r["T"] for r in table],
            [r["mean_abs_offdiag"] for r in table],
            "o", color=style.MC_COLOR, label="Monte Carlo mean",
        )
    if oracle:
        ts = [r["T"] for r in oracle]
        vals = [r["oracle"] for r in oracle]
        ax.plot(ts, vals, "-", color=style.ORACLE_COLOR, label="oracle (k_max=6)")
        # 1/T guide anchored at the first oracle point
        guide = [vals[0] * ts[0] / t for t in ts]
        ax.plot(ts, guide, ":", color=style.REFERENCE_COLOR, label="1/T reference")
    ax.legend(loc="lower left")
    style.save(fig, spec.out_path)
    return table


def main(argv=None) -> int:
    from ._cli import run_kind

    return run_kind("offdiag-decay", __doc__, argv)


if __name__ == "__main__":
    sys.exit(main())
