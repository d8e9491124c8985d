"""Reading the experiment log formats.

The records CSV and summary JSON written by the goevar harness are the only
interface between the simulation and these plotting scripts; nothing here
recomputes physics.  The CSV header is a wire contract and is checked
exactly, with an explicit column diff on mismatch.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

EXPECTED_HEADER = [
    "experiment_id",
    "L",
    "T",
    "replicate",
    "point_count",
    "mark_count",
    "pairs",
    "v_total",
    "diag11",
    "diag_tail",
    "offdiag",
    "abs_dev",
    "status",
    "wall_time_ms",
]

_FLOAT_FIELDS = ("L", "T", "v_total", "diag11", "diag_tail", "offdiag", "abs_dev")


class SchemaError(ValueError):
    """The input file does not match the harness schema."""


@dataclass(frozen=True)
class Record:
    experiment_id: str
    L: float
    T: float
    replicate: int
    v_total: float
    diag11: float
    diag_tail: float
    offdiag: float
    abs_dev: float
    status: str


def check_header(fieldnames) -> None:
    got = list(fieldnames or [])
    if got == EXPECTED_HEADER:
        return
    missing = [c for c in EXPECTED_HEADER if c not in got]
    unexpected = [c for c in got if c not in EXPECTED_HEADER]
    parts = [f"records CSV header does not match the harness schema"]
    if missing:
        parts.append(f"missing columns: {missing}")
    if unexpected:
        parts.append(f"unexpected columns: {unexpected}")
    if not missing and not unexpected:
        parts.append(f"column order differs: expected {EXPECTED_HEADER}, got {got}")
    raise SchemaError("; ".join(parts))


def load_records(path: str | Path) -> list[Record]:
    """Parse the records CSV, keeping only completed (status ok) rows."""
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        check_header(reader.fieldnames)
        records = []
        for row in reader:
            if row["status"] != "ok":
                continue
            records.append(
                Record(
                    experiment_id=row["experiment_id"],
                    L=float(row["L"]),
                    T=float(row["T"]),
                    replicate=int(row["replicate"]),
                    v_total=float(row["v_total"]),
                    diag11=float(row["diag11"]),
                    diag_tail=float(row["diag_tail"]),
                    offdiag=float(row["offdiag"]),
                    abs_dev=float(row["abs_dev"]),
                    status=row["status"],
                )
            )
    return records


def load_summary(path: str | Path) -> dict:
    payload = json.loads(Path(path).read_text())
    if not isinstance(payload, dict) or "rows" not in payload:
        raise SchemaError(f"{path}: not a harness summary (missing 'rows')")
    return payload


def group_by_block(records: list[Record]) -> dict[tuple[float, float], list[Record]]:
    """Group records by their (L, T) schedule entry, in (L, T) order."""
    blocks: dict[tuple[float, float], list[Record]] = {}
    for rec in records:
        blocks.setdefault((rec.L, rec.T), []).append(rec)
    return dict(sorted(blocks.items()))
