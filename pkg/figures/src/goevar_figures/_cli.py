"""Shared command-line front end: every figure script takes the same flags."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .records import SchemaError
from .spec import FigureConfigError, FigureSpec

EXIT_OK = 0
EXIT_CONFIG = 2


def run_kind(kind: str, description: str, argv=None) -> int:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--in", dest="records", required=True, help="records CSV")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--eps", type=float, default=0.05, help="deviation threshold")
    parser.add_argument("--summary", help="harness summary JSON (oracle values)")
    parser.add_argument(
        "--sigma2", type=float, default=None,
        help="reference target when no summary file is given",
    )
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(
            kind=kind,
            records_path=Path(args.records),
            out_path=Path(args.out),
            summary_path=None if args.summary is None else Path(args.summary),
            eps=args.eps,
            sigma2=args.sigma2,
        )
        from .spec import render

        render(spec)
    except (FigureConfigError, SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"wrote {args.out}")
    return EXIT_OK
