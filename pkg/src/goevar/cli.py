"""Command-line interface.

Subcommands:
  oracle      run the quadrature-oracle acceptance checks (A1-A5)
  experiment  run the full (L, T) schedule and write CSV records + JSON summary
  sample      emit one sampled length configuration in the ingestion format
  variance    evaluate the pair functional on a sampled or ingested spectrum
  ingest      validate and normalize an external length-spectrum file

Exit codes: 0 success, 2 config error, 3 budget refusal, 4 oracle-check
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .harness import (
    ConfigError,
    ExperimentConfig,
    run_oracle_suite,
    run_schedule,
    write_records_csv,
    write_records_json,
    write_summary_json,
)
from .numerics import BudgetError, RngStream
from .pointprocess import (
    IntensityMeasure,
    SamplerBudget,
    load_length_file,
    sample,
    save_length_file,
)
from .testfuncs import sigma2_goe
from .variance import build_marks, phi

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_ORACLE = 4


def _load_config(path: str | None, seed: int | None) -> ExperimentConfig:
    if path is None:
        cfg = ExperimentConfig()
    else:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        cfg = ExperimentConfig.from_dict(data)
    if seed is not None:
        cfg = replace(cfg, root_seed=seed)
    return cfg


def _cmd_oracle(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config, args.seed)
    cfg.validate(check_budget=False)
    report = run_oracle_suite(
        cfg, quick=args.quick, sigma2_target_override=args.sigma2_target
    )
    for line in report.lines():
        print(line)
    return EXIT_OK if report.all_passed else EXIT_ORACLE


def _cmd_experiment(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config, args.seed)
    cfg.validate(check_budget=True)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    records, rows = run_schedule(cfg, threads=args.threads)
    if args.format == "csv":
        write_records_csv(records, out_dir / "records.csv")
    else:
        write_records_json(records, out_dir / "records.json")
    write_summary_json(cfg, rows, out_dir / "summary.json")
    for row in rows:
        mean = "n/a" if row.mean_abs_dev is None else f"{row.mean_abs_dev:.5f}"
        prob = "n/a" if row.prob_dev_gt_eps is None else f"{row.prob_dev_gt_eps:.4f}"
        print(
            f"L={row.L:g} T={row.T:.4g} R={row.R} mean|dev|={mean} "
            f"P(|dev|>eps)={prob} status={row.status}"
        )
    print(f"wrote {out_dir / ('records.' + args.format)} and {out_dir / 'summary.json'}")
    return EXIT_OK


def _cmd_sample(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config, args.seed)
    nu = IntensityMeasure.build(args.x_max)
    stream = RngStream(cfg.root_seed, args.stream)
    config = sample(nu, stream, cfg.budget)
    if args.out is None or args.out == "-":
        for value in config.lengths.tolist():
            print(repr(value))
    else:
        save_length_file(config, args.out)
        print(f"wrote {config.count} lengths to {args.out}", file=sys.stderr)
    return EXIT_OK


def _cmd_variance(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config, args.seed)
    tf = cfg.test_function()
    wf = cfg.weight()
    if args.infile is not None:
        config = load_length_file(args.infile)
    else:
        nu = IntensityMeasure.build(tf.support_radius * args.L)
        config = sample(nu, RngStream(cfg.root_seed, args.stream), cfg.budget)
    marks = build_marks(config, tf, args.L, max_marks=cfg.max_marks)
    decomposition = phi(marks, wf, args.T)
    payload = {
        "L": args.L,
        "T": args.T,
        "source": config.source,
        "point_count": config.count,
        "mark_count": len(marks),
        "pairs_evaluated": decomposition.pairs_evaluated,
        "v_total": decomposition.total,
        "diag11": decomposition.diag11,
        "diag_tail": decomposition.diag_tail,
        "offdiag": decomposition.offdiag,
        "sigma2_target": sigma2_goe(tf),
        "abs_dev": abs(decomposition.total - sigma2_goe(tf)),
    }
    text = json.dumps(payload, indent=2)
    if args.out is None or args.out == "-":
        print(text)
    else:
        Path(args.out).write_text(text + "\n")
    return EXIT_OK


def _cmd_ingest(args: argparse.Namespace) -> int:
    try:
        config = load_length_file(args.infile)
    except ValueError as exc:
        print(f"invalid spectrum file: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    save_length_file(config, args.out)
    genus = "unknown" if config.genus is None else str(config.genus)
    print(f"validated {config.count} lengths (genus={genus}) -> {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="goevar",
        description="Energy-variance laboratory for Poisson-model length spectra",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file (ExperimentConfig keys)")
        p.add_argument("--seed", type=int, help="override the config root seed")

    p_oracle = sub.add_parser("oracle", help="run the A1-A5 oracle checks")
    add_common(p_oracle)
    p_oracle.add_argument(
        "--quick", action="store_true", help="smaller Monte Carlo sizes (smoke mode)"
    )
    p_oracle.add_argument(
        "--sigma2-target",
        type=float,
        default=None,
        help="override the GOE target (negative-control knob; perturbing it must fail)",
    )
    p_oracle.set_defaults(func=_cmd_oracle)

    p_exp = sub.add_parser("experiment", help="run the (L, T) schedule")
    add_common(p_exp)
    p_exp.add_argument("--threads", type=int, default=1)
    p_exp.add_argument("--out", default="results", help="output directory")
    p_exp.add_argument("--format", choices=("csv", "json"), default="csv")
    p_exp.set_defaults(func=_cmd_experiment)

    p_sample = sub.add_parser("sample", help="emit one sampled configuration")
    add_common(p_sample)
    p_sample.add_argument("--x-max", dest="x_max", type=float, required=True)
    p_sample.add_argument("--stream", type=int, default=0, help="stream index")
    p_sample.add_argument("--out", help="output file ('-' or omitted: stdout)")
    p_sample.set_defaults(func=_cmd_sample)

    p_var = sub.add_parser("variance", help="pair functional on a spectrum")
    add_common(p_var)
    p_var.add_argument("--L", type=float, required=True)
    p_var.add_argument("--T", type=float, required=True)
    p_var.add_argument("--in", dest="infile", help="ingested spectrum file")
    p_var.add_argument("--stream", type=int, default=0, help="stream index when sampling")
    p_var.add_argument("--out", help="output file ('-' or omitted: stdout)")
    p_var.set_defaults(func=_cmd_variance)

    p_ingest = sub.add_parser("ingest", help="validate an external spectrum file")
    p_ingest.add_argument("--in", dest="infile", required=True)
    p_ingest.add_argument("--out", required=True, help="normalized output file")
    p_ingest.set_defaults(func=_cmd_ingest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetError as exc:
        print(f"budget refusal: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
