import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from telegraph_ldp.cli import dispatch, parse_grid
from telegraph_ldp.errors import ValidationError
from telegraph_ldp.params import dump_params, validate_params


@pytest.fixture
def fig1_json(tmp_path, fig1):
    return str(dump_params(fig1, tmp_path / "fig1.json"))


@pytest.fixture
def unstable_json(tmp_path, unstable):
    return str(dump_params(unstable, tmp_path / "unstable.json"))


def _rows(text):
    return list(csv.DictReader(text.splitlines()))


def test_parse_grid():
    g = parse_grid("-2:1:0.01")
    assert len(g) == 301 and g[0] == -2.0 and g[-1] == 1.0
    assert parse_grid("0:1:0.3").tolist() == [0.0, 0.3, 0.6, 0.9]
    for bad in ("1:0:0.1", "0:1:0", "a:b:c", "0:1"):
        with pytest.raises(ValidationError):
            parse_grid(bad)


def test_decay_stdout(fig1_json, capsys):
    assert dispatch(["decay", "--params", fig1_json, "--process", "damped"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["w_closed"] == 1.0 and abs(report["w_numeric"] - 1.0) <= 1e-8


def test_decay_unstable(unstable_json, capsys):
    assert dispatch(["decay", "--params", unstable_json, "--process", "damped"]) == 1
    assert "stability" in capsys.readouterr().err


def test_rate_grid_last_row(fig1_json, capsys):
    assert dispatch(["rate", "--params", fig1_json, "--grid", "-2:1:0.01"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 301
    assert float(rows[-1]["x"]) == 1.0 and float(rows[-1]["I_D"]) == 1.0


def test_density_out_dir(fig1_json, tmp_path):
    out = tmp_path / "out"
    assert dispatch(["density", "--params", fig1_json, "--t", "1", "--grid", "-2:1:0.5", "--out-dir", str(out)]) == 0
    rows = _rows((out / "density.csv").read_text())
    assert [float(r["x"]) for r in rows] == [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0]
    assert float(rows[0]["p"]) == 0.0 and rows[0]["log_p"] == "-inf"
    manifest = json.loads((out / "density.manifest.json").read_text())
    assert manifest["outputs"] == ["density.csv"] and manifest["params"]["c2"] == 2.0


def test_simulate_csv(fig1_json, capsys):
    assert dispatch(["simulate", "--params", fig1_json, "--horizon", "2", "--n", "3", "--seed", "1"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert {r["path_id"] for r in rows} == {"0", "1", "2"}


def test_ldp_verify(fig1_json, capsys):
    assert dispatch(["ldp-verify", "--params", fig1_json, "--x", "0.5", "--times", "50,200"]) == 0
    rows = _rows(capsys.readouterr().out)
    last = rows[-1]
    assert abs(float(last["scaled_log_prob"]) - float(last["target"])) <= 0.05


def test_crossing(fig1_json, tmp_path, capsys):
    out = tmp_path / "c"
    code = dispatch(["crossing", "--params", fig1_json, "--process", "standard", "--n", "20000",
                     "--q-grid", "1:4:1", "--out-dir", str(out)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["process"] == "standard" and not summary["flagged"]
    rows = _rows((out / "crossing.csv").read_text())
    assert [float(r["q"]) for r in rows] == [1.0, 2.0, 3.0, 4.0]


def test_crossing_unstable(unstable_json, capsys):
    assert dispatch(["crossing", "--params", unstable_json, "--n", "10"]) == 1


def test_compare_unstable(unstable_json, capsys):
    assert dispatch(["compare", "--params", unstable_json, "--grid-size", "101", "--n", "1000"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["crossing"] == {"skipped": "unstable regime"}


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["decay"],
    ["decay", "--params", "/nonexistent.json"],
    ["density", "--params", "PLACEHOLDER", "--t", "0", "--grid", "0:1:0.5"],
])
def test_usage_errors_exit_1(argv, fig1_json, capsys):
    argv = [fig1_json if a == "PLACEHOLDER" else a for a in argv]
    assert dispatch(argv) == 1
    assert capsys.readouterr().err


def test_bad_params_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"lambda1": 1, "lambda2": 1, "c1": 0, "c2": 2, "alpha": 0.5}))
    assert dispatch(["rate", "--params", str(path)]) == 1


def test_numerical_failure_exit_2(tmp_path, capsys):
    p = validate_params(1, 1, 1, 2, 0.5)
    path = dump_params(p, tmp_path / "p.json")
    code = dispatch(["simulate", "--params", str(path), "--horizon", "1000", "--n", "1"])
    assert code == 2
    assert "numerical failure" in capsys.readouterr().err


def test_rerun_is_byte_identical(fig1_json, tmp_path):
    outs = []
    for i in range(2):
        out = tmp_path / f"run{i}"
        dispatch(["rate", "--params", fig1_json, "--out-dir", str(out)])
        outs.append((out / "rate.csv").read_bytes())
    assert outs[0] == outs[1]


def test_console_script(fig1_json):
    res = subprocess.run([sys.executable, "-m", "telegraph_ldp.cli", "decay", "--params", fig1_json,
                          "--process", "standard"], capture_output=True, text=True)
    assert res.returncode == 0
    assert math.isclose(json.loads(res.stdout)["w_closed"], 0.5)
    assert np.isfinite(json.loads(res.stdout)["argmin_x"])


def test_negative_list_values(fig1_json, capsys):
    assert dispatch(["ldp-verify", "--params", fig1_json, "--x", "-1,0", "--times", "25"]) == 0
    assert len(_rows(capsys.readouterr().out)) == 2
