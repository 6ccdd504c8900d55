import csv
import json
import subprocess
import sys

import pytest

from binae.cli import fmt, main
from binae.experiments import EXPERIMENTS

# tiny settings per experiment so every driver runs in about a second
SMALL = {
    "sweep-sparsity": ["--trials", "3"],
    "sweep-ratio": ["--trials", "2", "--values", "1,2", "--nx", "20", "--ax", "8", "--aw", "10"],
    "sweep-ax": ["--trials", "3", "--values", "5,25"],
    "sweep-aw": ["--trials", "3", "--values", "10:30:10"],
    "mi-curve": ["--nx", "10", "--ny", "14", "--ax", "5", "--aw", "4", "--values", "3,7"],
    "map-curve": ["--trials", "1", "--values", "10,100"],
    "analytic-compare": ["--trials", "3"],
    "threshold-approx": ["--trials", "3", "--values", "20,21"],
    "attractor-census": ["--trials", "1", "--samples", "50"],
    "weights-comparison": ["--trials", "3", "--values", "20,30"],
    "axr-average": ["--trials", "5", "--values", "30,60"],
}


def _run(tmp_path, *args, name="out.csv"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


@pytest.mark.parametrize("experiment", EXPERIMENTS)
def test_every_experiment_writes_a_table(tmp_path, experiment):
    code, out = _run(tmp_path, experiment, *SMALL[experiment])
    assert code == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert rows and "trials" in rows[0]
    assert all(float(r[c]) >= 0 for r in rows for c in r if c.endswith("_std"))


def test_csv_uses_six_significant_digits_and_lf(tmp_path):
    _, out = _run(tmp_path, "sweep-sparsity", "--trials", "7")
    raw = out.read_bytes()
    assert b"\r" not in raw
    header, *lines = raw.decode().splitlines()
    assert header == "model,control,sparsity,sparsity_std,error,error_std,trials"
    for line in lines:
        for cell in line.split(",")[2:6]:
            digits = cell.replace(".", "").replace("-", "").split("e")[0].lstrip("0")
            assert len(digits) <= 6


def test_fmt():
    assert fmt(1 / 3) == "0.333333"
    assert fmt(12345678.0) == "1.23457e+07"
    assert fmt(7) == "7" and fmt(float("nan")) == "nan"


def test_json_document_shape(tmp_path):
    code, out = _run(tmp_path, "sweep-sparsity", "--trials", "2", "--format", "json", name="o.json")
    doc = json.loads(out.read_text())
    assert code == 0
    assert set(doc) == {"config", "rows", "runtime_seconds", "version"}
    assert doc["config"]["trials"] == 2 and doc["config"]["experiment"] == "sweep-sparsity"


def test_output_independent_of_worker_count(tmp_path):
    args = ["sweep-ratio", "--trials", "4", "--values", "1,2", "--model", "kwta", "--seed", "3"]
    _, a = _run(tmp_path, *args, "--workers", "1", name="a.csv")
    _, b = _run(tmp_path, *args, "--workers", "3", name="b.csv")
    assert a.read_bytes() == b.read_bytes()


def test_seed_changes_output(tmp_path):
    _, a = _run(tmp_path, "sweep-sparsity", "--trials", "3", "--seed", "1", name="a.csv")
    _, b = _run(tmp_path, "sweep-sparsity", "--trials", "3", "--seed", "2", name="b.csv")
    assert a.read_bytes() != b.read_bytes()


@pytest.mark.parametrize("args", [
    ["sweep-sparsity", "--trials", "0"],
    ["sweep-sparsity", "--ax", "60"],
    ["sweep-sparsity", "--model", "cubic"],
    ["sweep-ax", "--values", ""],
    ["no-such-experiment"],
    ["sweep-sparsity", "--values", "a,b"],
])
def test_config_errors_exit_2(tmp_path, args, capsys):
    assert main([*args, "--out", str(tmp_path / "x.csv")]) == 2


def test_io_error_exits_1(tmp_path):
    assert main(["sweep-sparsity", "--trials", "1", "--out", str(tmp_path / "missing" / "x.csv")]) == 1


def test_random_decoder_flag(tmp_path):
    code, out = _run(tmp_path, "sweep-sparsity", "--model", "kwta", "--decoder", "random", "--trials", "2")
    assert code == 0 and out.read_text().startswith("model,")


def test_console_script_runs():
    res = subprocess.run([sys.executable, "-m", "binae.cli", "sweep-sparsity", "--trials", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("model,control")
    assert "curve minimum" in res.stderr
