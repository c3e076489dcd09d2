import json

import numpy as np
import pytest

from temporal_advantage import model_to_dict, one_way_classical, save_model
from temporal_advantage.cli import main
from temporal_advantage.serialize import channel_to_dict

from conftest import random_commuting_preps_channel


def run_cli(*argv):
    return main(list(argv))


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as excinfo:
        run_cli("no-such-command")
    assert excinfo.value.code == 64


def test_missing_required_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        run_cli("eval", "--sequence", "01")
    assert excinfo.value.code == 64


def test_construct_and_eval_round_trip(tmp_path, capsys):
    out = tmp_path / "model.json"
    assert run_cli("construct", "one-way", "--L", "4", "--out", str(out)) == 0
    assert run_cli("eval", "--model", str(out), "--sequence", "0001") == 0
    printed = capsys.readouterr().out.strip()
    assert float(printed) == 0.31640625


def test_construct_requires_family_parameter(capsys):
    assert run_cli("construct", "one-way") == 64


def test_validate_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.json"
    save_model(one_way_classical(4), good)
    assert run_cli("validate", "--model", str(good)) == 0

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(
        {"classical": {"pi": [0.5, 0.6], "t0": [[0.5, 0], [0, 0.5]], "t1": [[0.5, 0], [0, 0.5]]}}
    ))
    assert run_cli("validate", "--model", str(bad)) == 1
    assert "pi sums to 1.1" in capsys.readouterr().out


def test_missing_model_file(capsys):
    assert run_cli("validate", "--model", "/nonexistent/model.json") == 64


def test_malformed_model_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert run_cli("validate", "--model", str(path)) == 1


def test_effective_output(tmp_path, capsys):
    model_path = tmp_path / "etf.json"
    out_path = tmp_path / "effective.json"
    assert run_cli("construct", "etf", "--d", "3", "--out", str(model_path)) == 0
    assert run_cli("effective", "--model", str(model_path), "--out", str(out_path)) == 0
    effective_doc = json.loads(out_path.read_text())
    assert len(effective_doc["classical"]["pi"]) == 4

    assert run_cli("eval", "--model", str(model_path), "--sequence", "0001") == 0
    quantum_p = float(capsys.readouterr().out.strip())
    assert run_cli("eval", "--model", str(out_path), "--sequence", "0001") == 0
    chain_p = float(capsys.readouterr().out.strip())
    assert quantum_p == pytest.approx(chain_p, abs=1e-10)
    assert quantum_p > 0.31640625


def test_eval_no_channel_flag(tmp_path, capsys):
    model_path = tmp_path / "etf.json"
    run_cli("construct", "etf", "--d", "3", "--out", str(model_path))
    assert run_cli("eval", "--model", str(model_path), "--sequence", "0001", "--no-channel") == 0
    # without the channel the start state never leaves |0><0|, which never ticks
    assert float(capsys.readouterr().out.strip()) == pytest.approx(0.0, abs=1e-14)


def test_reduce_cli(tmp_path, capsys):
    rng = np.random.default_rng(5)
    channel_path = tmp_path / "channel.json"
    out_path = tmp_path / "reduced.json"
    channel_path.write_text(json.dumps(
        {"channel": channel_to_dict(random_commuting_preps_channel(rng, 3, 5))}
    ))
    assert run_cli("reduce", "--model", str(channel_path), "--out", str(out_path)) == 0
    reduced = json.loads(out_path.read_text())
    assert len(reduced["channel"]["effects"]) == 3
    assert "commuting-states" in capsys.readouterr().err


def test_reduce_refusal_exit(tmp_path, capsys):
    model_path = tmp_path / "etf.json"
    run_cli("construct", "etf", "--d", "3", "--out", str(model_path))
    assert run_cli("reduce", "--model", str(model_path)) == 1


def test_dc_cli(capsys):
    assert run_cli("dc", "--sequence", "0001") == 0
    assert capsys.readouterr().out.strip() == "4"
    assert run_cli("dc", "--sequence", "000000001", "--d", "8") == 0
    assert "exceeds d_max" in capsys.readouterr().out


def test_table1_deterministic(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run_cli("table1", "--seed", "3", "--out", str(a)) == 0
    assert run_cli("table1", "--seed", "3", "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "L,d,classical,quantum,ratio,source"
    assert "0.31640625" in lines[2]


def test_fig3_csv(tmp_path):
    out = tmp_path / "curve.csv"
    assert run_cli("fig3", "--Lmin", "3", "--Lmax", "7", "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "L,classical,quantum_etf"
    assert len(lines) == 6
    for line in lines[1:]:
        length, classical, _ = line.split(",")
        assert float(classical) == pytest.approx(
            (1 - 1 / int(length)) ** int(length), rel=1e-12
        )


def test_fig3_json_format(capsys):
    assert run_cli("fig3", "--Lmin", "3", "--Lmax", "4", "--format", "json") == 0
    points = json.loads(capsys.readouterr().out)
    assert points[1]["quantum_etf"] > points[1]["classical"]


def test_verify_appendix_cli(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    assert run_cli("verify-appendix", "--out", str(report_path)) == 0
    output = capsys.readouterr().out
    assert "model L4" in output and "model L5" in output
    reports = json.loads(report_path.read_text())
    assert [r["label"] for r in reports] == ["L4", "L5"]
    assert all(r["ok"] for r in reports)


def test_optimize_cli_with_config(tmp_path, capsys):
    config = tmp_path / "run.json"
    model_out = tmp_path / "best.json"
    log_out = tmp_path / "log.csv"
    config.write_text(json.dumps({
        "sequence": "001",
        "d": 2,
        "m": 3,
        "iterations": 60,
        "lr_start": 0.03,
        "lr_end": 1e-3,
        "trials": 2,
        "seed": 0,
        "workers": 1,
    }))
    assert run_cli("optimize", "--config", str(config), "--out", str(model_out), "--log", str(log_out)) == 0
    doc = json.loads(model_out.read_text())
    assert doc["quantum"] is not None
    log_lines = log_out.read_text().splitlines()
    assert log_lines[0] == "trial,objective,plateau_iteration"
    assert len(log_lines) == 3
    assert "best probability" in capsys.readouterr().err


def test_optimize_needs_sequence_and_d():
    assert run_cli("optimize", "--trials", "1") == 64
