import csv
import json
import math

import numpy as np
import pytest

from goevar.harness import (
    CSV_FIELDS,
    ConfigError,
    ExperimentConfig,
    default_replicates,
    default_schedule,
    experiment_stream_index,
    run_oracle_suite,
    run_replicate,
    run_schedule,
    summarize,
    write_records_csv,
    write_records_json,
    write_summary_json,
    _make_context,
)
from goevar.pointprocess import SamplerBudget


def small_config(**overrides):
    defaults = dict(
        schedule=((2.0, math.exp(6.0)), (3.0, math.exp(9.0))),
        replicates=40,
        root_seed=987,
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


def test_default_replicates_tiers():
    assert default_replicates(4.0) == 2000
    assert default_replicates(6.0) == 2000
    assert default_replicates(8.0) == 500
    assert default_replicates(10.0) == 200


def test_default_schedule_rule():
    sched = default_schedule()
    assert [L for L, _ in sched] == [4.0, 6.0, 8.0, 10.0]
    for L, T in sched:
        assert T == pytest.approx(math.exp(3.0 * L))


def test_config_validation_errors():
    with pytest.raises(ConfigError):
        ExperimentConfig(epsilon=0.0).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(replicates=0).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(schedule=()).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(fhat_power=1).validate()
    # L = 24 needs x_max beyond the budget: rejected up front
    with pytest.raises(ConfigError):
        ExperimentConfig(schedule=((30.0, 1e6),)).validate()
    # expected point count over budget at feasible x_max
    with pytest.raises(ConfigError):
        ExperimentConfig(
            schedule=((20.0, 1e6),),
            budget=SamplerBudget(max_expected_points=1000, max_x_max=24.0),
        ).validate()
    small_config().validate()


def test_config_dict_round_trip():
    cfg = small_config(epsilon=0.07)
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg


def test_config_from_dict_errors():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"bogus": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"schedule": [{"L": 4.0}]})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"schedule": {"rule": "linear"}})
    cfg = ExperimentConfig.from_dict(
        {"schedule": {"rule": "exp", "rate": 2.0, "L_values": [3, 4]}}
    )
    assert cfg.schedule[0] == (3.0, pytest.approx(math.exp(6.0)))


def test_stream_index_distinct():
    a = experiment_stream_index("L4-T100", 0)
    b = experiment_stream_index("L4-T100", 1)
    c = experiment_stream_index("L6-T100", 0)
    assert len({a, b, c}) == 3
    assert a == experiment_stream_index("L4-T100", 0)


def test_run_replicate_deterministic():
    cfg = small_config()
    first = run_replicate(cfg, 3.0, math.exp(9.0), 5)
    second = run_replicate(cfg, 3.0, math.exp(9.0), 5)
    # equality ignores wall_time_ms (a measurement, not state)
    assert first == second
    assert first.status == "ok"
    assert first.abs_dev is not None and first.abs_dev >= 0.0


def test_run_replicate_budget_refusal_row():
    cfg = small_config(budget=SamplerBudget(max_expected_points=0.5, max_x_max=24.0))
    rec = run_replicate(cfg, 3.0, math.exp(9.0), 0)
    assert rec.status == "budget_refused"
    assert rec.v_total is None
    assert rec.abs_dev is None


def test_run_schedule_thread_invariance():
    cfg = small_config(replicates=16)
    serial_records, serial_rows = run_schedule(cfg, threads=1, attach_oracles=False)
    threaded_records, threaded_rows = run_schedule(cfg, threads=4, attach_oracles=False)
    assert serial_records == threaded_records
    assert serial_rows == threaded_rows


def test_run_schedule_summary_consistency():
    cfg = small_config()
    records, rows = run_schedule(cfg, attach_oracles=False)
    assert len(records) == 80
    by_block = {}
    for rec in records:
        by_block.setdefault((rec.L, rec.T), []).append(rec)
    for row in rows:
        block = by_block[(row.L, row.T)]
        devs = np.array([r.abs_dev for r in block if r.status == "ok"])
        assert row.R == devs.size
        assert row.mean_abs_dev == pytest.approx(devs.mean())
        assert row.prob_dev_gt_eps == pytest.approx(np.mean(devs > cfg.epsilon))
        # Markov sanity: P(|dev| > eps) <= E|dev|/eps + 4 * binomial SE
        se_binom = math.sqrt(
            max(row.prob_dev_gt_eps * (1 - row.prob_dev_gt_eps), 1.0 / row.R) / row.R
        )
        assert row.prob_dev_gt_eps <= row.mean_abs_dev / cfg.epsilon + 4.0 * se_binom


def test_run_schedule_attaches_oracles():
    cfg = small_config(schedule=((3.0, 1e3),), replicates=5)
    _, rows = run_schedule(cfg, attach_oracles=True)
    row = rows[0]
    assert row.status == "ok"
    assert row.oracle_diag11 == pytest.approx(0.4, abs=1e-3)
    assert row.oracle_offdiag_abs > 0.0
    assert row.oracle_ktail > 0.0


def test_summary_with_single_replicate_has_no_std_err():
    cfg = small_config(schedule=((2.0, 1e3),), replicates=1)
    records, rows = run_schedule(cfg, attach_oracles=False)
    assert rows[0].R == 1
    assert rows[0].std_err is None


def test_records_csv_format(tmp_path):
    cfg = small_config(schedule=((2.0, 1e3),), replicates=3)
    records, rows = run_schedule(cfg, attach_oracles=False)
    path = tmp_path / "records.csv"
    write_records_csv(records, path)
    text = path.read_text().splitlines()
    assert text[0] == (
        "experiment_id,L,T,replicate,point_count,mark_count,pairs,v_total,"
        "diag11,diag_tail,offdiag,abs_dev,status,wall_time_ms"
    )
    rows_read = list(csv.DictReader(text))
    assert len(rows_read) == 3
    # full-precision float round trip
    assert float(rows_read[0]["v_total"]) == records[0].v_total
    assert rows_read[0]["status"] == "ok"


def test_records_csv_missing_value_sentinel(tmp_path):
    cfg = small_config(
        schedule=((2.0, 1e3),),
        replicates=1,
        budget=SamplerBudget(max_expected_points=0.5, max_x_max=24.0),
    )
    records, rows = run_schedule(cfg, attach_oracles=False)
    path = tmp_path / "records.csv"
    write_records_csv(records, path)
    row = list(csv.DictReader(path.read_text().splitlines()))[0]
    assert row["status"] == "budget_refused"
    assert row["v_total"] == ""  # empty cell, not NaN
    spath = tmp_path / "summary.json"
    write_summary_json(cfg, rows, spath)
    payload = json.loads(spath.read_text())
    assert payload["rows"][0]["mean_abs_dev"] is None
    assert payload["rows"][0]["status"] == "no_ok_rows"


def test_records_json_round_trip(tmp_path):
    cfg = small_config(schedule=((2.0, 1e3),), replicates=2)
    records, _ = run_schedule(cfg, attach_oracles=False)
    path = tmp_path / "records.json"
    write_records_json(records, path)
    payload = json.loads(path.read_text())
    assert payload[0]["experiment_id"] == records[0].experiment_id
    assert payload[0]["v_total"] == records[0].v_total
    assert set(payload[0]) == set(CSV_FIELDS)


def test_oracle_suite_quick_passes():
    report = run_oracle_suite(quick=True)
    for line in report.lines():
        assert line.startswith(("A1", "A2", "A3", "A4", "A5"))
    assert report.all_passed, "\n".join(report.lines())


def test_oracle_suite_negative_control():
    """Perturbing the GOE target by +0.1 must fail the diagonal checks."""
    report = run_oracle_suite(quick=True, sigma2_target_override=0.5)
    by_id = {c.check_id: c for c in report.checks}
    assert not by_id["A2"].passed
    assert not report.all_passed
