import csv
import json
import math

import numpy as np
import pytest

from goevar.cli import main
from goevar.pointprocess import load_length_file


def test_sample_and_ingest_round_trip(tmp_path, capsys):
    out = tmp_path / "sample.txt"
    code = main(["sample", "--x-max", "6.0", "--seed", "77", "--stream", "3",
                 "--out", str(out)])
    assert code == 0
    cfg = load_length_file(out)
    assert cfg.count > 0

    normalized = tmp_path / "normalized.txt"
    code = main(["ingest", "--in", str(out), "--out", str(normalized)])
    assert code == 0
    again = load_length_file(normalized)
    assert np.array_equal(again.lengths, cfg.lengths)


def test_sample_budget_refusal(tmp_path):
    code = main(["sample", "--x-max", "30.0", "--out", str(tmp_path / "x.txt")])
    assert code == 3


def test_ingest_invalid_exit_code(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1.0\n-3.0\n")
    code = main(["ingest", "--in", str(bad), "--out", str(tmp_path / "out.txt")])
    assert code == 2


def test_variance_on_ingested_spectrum(tmp_path, capsys):
    spectrum = tmp_path / "spectrum.txt"
    spectrum.write_text("1.1\n2.3\n3.0\n")
    out = tmp_path / "variance.json"
    code = main([
        "variance", "--L", "4.0", "--T", "100.0", "--in", str(spectrum),
        "--out", str(out),
    ])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["point_count"] == 3
    assert payload["v_total"] == pytest.approx(
        payload["diag11"] + payload["diag_tail"] + payload["offdiag"], abs=1e-15
    )
    assert payload["abs_dev"] == pytest.approx(
        abs(payload["v_total"] - payload["sigma2_target"]), abs=1e-15
    )

    # library cross-check: the CLI must not transform values
    import goevar as gv

    tf = gv.make_polynomial_testfn(2, 1.0)
    expected = gv.phi(
        gv.build_marks(load_length_file(spectrum), tf, 4.0), gv.make_weight("bspline4"), 100.0
    )
    assert payload["v_total"] == expected.total


def test_experiment_end_to_end(tmp_path, capsys):
    config = {
        "schedule": [{"L": 2.0, "T": 500.0}, {"L": 3.0, "T": 8000.0}],
        "replicates": 5,
        "root_seed": 4242,
        "epsilon": 0.05,
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    out_dir = tmp_path / "results"
    code = main([
        "experiment", "--config", str(config_path), "--out", str(out_dir),
        "--format", "csv",
    ])
    assert code == 0
    records = list(csv.DictReader((out_dir / "records.csv").read_text().splitlines()))
    assert len(records) == 10
    summary = json.loads((out_dir / "summary.json").read_text())
    assert len(summary["rows"]) == 2
    assert summary["config"]["root_seed"] == 4242
    captured = capsys.readouterr()
    assert "L=2" in captured.out


def test_experiment_rejects_bad_config(tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"epsilon": -1.0}))
    code = main(["experiment", "--config", str(config_path), "--out", str(tmp_path / "r")])
    assert code == 2
    config_path.write_text("{not json")
    code = main(["experiment", "--config", str(config_path), "--out", str(tmp_path / "r")])
    assert code == 2


def test_experiment_rejects_overbudget_schedule(tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps({"schedule": [{"L": 30.0, "T": 1e6}]}))
    code = main(["experiment", "--config", str(config_path), "--out", str(tmp_path / "r")])
    assert code == 2


def test_oracle_negative_control_exit_code(capsys):
    code = main(["oracle", "--quick", "--sigma2-target", "0.5"])
    assert code == 4
    out = capsys.readouterr().out
    assert "A2 FAIL" in out
    assert "A1" in out and "A5" in out
