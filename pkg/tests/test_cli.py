import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from weingarten_flow.cli import (
    EXIT_CHECK, EXIT_CONFIG, EXIT_IO, EXIT_OK, RESULT_SCHEMA, dumps, fmt_float, main,
)
from weingarten_flow.config import ConfigError, parse_run_config, set_path

SPHERE = {
    "ambient": {"kind": "space_form", "eps": 0, "dim": 3},
    "family": {"kind": "geodesic_sphere"},
    "weingarten": {"kind": "norm2"},
    "tau0": 1.0,
}


@pytest.fixture
def cfg(tmp_path):
    def write(doc, name="run.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)
    return write


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_collapse_record(capsys, cfg):
    code, out, _ = run(capsys, ["collapse", "--config", cfg(SPHERE)])
    assert code == EXIT_OK
    rec = json.loads(out)
    jsonschema.validate(rec, RESULT_SCHEMA)
    assert rec["verdict"] == "collapsed" and rec["end"] == "center"
    assert rec["T"] == pytest.approx(1 / 6, rel=1e-10)
    assert rec["abs_diff"] <= 1e-8
    assert rec["config_echo"] == SPHERE


def test_spherical_h1_example(capsys, cfg):
    doc = {"ambient": {"kind": "space_form", "eps": 1, "dim": 3},
           "family": {"kind": "geodesic_sphere"}, "weingarten": {"kind": "H", "r": 1},
           "tau0": 0.7853981633974483}
    code, out, _ = run(capsys, ["collapse", "--config", cfg(doc)])
    rec = json.loads(out)
    assert code == 0 and rec["T"] == pytest.approx(0.17329, abs=1e-5) and rec["abs_diff"] <= 1e-8


def test_equidistant_reports_non_collapsing(capsys, cfg):
    doc = {"ambient": {"kind": "space_form", "eps": -1, "dim": 4},
           "family": {"kind": "equidistant"}, "weingarten": {"kind": "H", "r": 1}, "tau0": 1.0}
    code, out, _ = run(capsys, ["collapse", "--config", cfg(doc)])
    rec = json.loads(out)
    assert code == 0 and rec["verdict"] == "non-collapsing" and rec["reason"] == "asymptotic-to-Pi"
    jsonschema.validate(rec, RESULT_SCHEMA)


def test_munzner_equal_multiplicities(capsys, cfg):
    doc = {"ambient": {"kind": "space_form", "eps": 1, "dim": 5},
           "family": {"kind": "munzner", "multiplicities": [2, 2]},
           "weingarten": {"kind": "K"}, "tau0": 0.4}
    rec = json.loads(run(capsys, ["collapse", "--config", cfg(doc)])[1])
    assert abs(rec["T"] - 0.4) <= 1e-10


def test_overrides_win_over_config(capsys, cfg):
    code, out, _ = run(capsys, ["collapse", "--config", cfg(SPHERE), "--set", "tau0=0.5",
                                "--set", "ambient.dim=4"])
    rec = json.loads(out)
    assert rec["config_echo"]["tau0"] == 0.5
    assert rec["T"] == pytest.approx(0.5**3 / 9, rel=1e-10)
    code, out, _ = run(capsys, ["--tau0", "0.25", "collapse", "--config", cfg(SPHERE)])
    assert json.loads(out)["T"] == pytest.approx(0.25**3 / 6, rel=1e-10)


def test_bad_multiplicities_exit_2(capsys, cfg):
    doc = dict(SPHERE, ambient={"kind": "space_form", "eps": 1, "dim": 3},
               family={"kind": "munzner", "multiplicities": [2, 3]})
    code, _, err = run(capsys, ["collapse", "--config", cfg(doc)])
    assert code == EXIT_CONFIG
    assert "family.multiplicities" in err


@pytest.mark.parametrize("mutate,path", [
    (lambda d: set_path(d, "weingarten.kind", "H9"), "weingarten.kind"),
    (lambda d: set_path(d, "tau0", "one"), "tau0"),
    (lambda d: {k: v for k, v in d.items() if k != "family"}, "family"),
    (lambda d: set_path(d, "solver.rtol", 2.0), "solver"),
    (lambda d: set_path(d, "output.format", "xml"), "output.format"),
    (lambda d: set_path(d, "weingarten", {"kind": "H", "r": 5}), "weingarten"),
])
def test_config_error_paths(mutate, path):
    with pytest.raises(ConfigError) as info:
        parse_run_config(mutate(SPHERE))
    assert info.value.path.startswith(path)


def test_io_errors_exit_4(capsys, cfg, tmp_path):
    assert run(capsys, ["collapse", "--config", str(tmp_path / "missing.json")])[0] == EXIT_IO
    out = str(tmp_path / "no" / "such" / "dir.json")
    assert run(capsys, ["collapse", "--config", cfg(SPHERE), "--output", out])[0] == EXIT_IO


def test_invalid_json_is_config_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, ["collapse", "--config", str(bad)])[0] == EXIT_CONFIG


def test_simulate_csv_columns(capsys, cfg, tmp_path):
    doc = dict(SPHERE, ambient={"kind": "hyperbolic", "field": "C", "m": 2},
               family={"kind": "hf_sphere"}, weingarten={"kind": "H", "r": 1})
    out = tmp_path / "traj.csv"
    code, stdout, _ = run(capsys, ["simulate", "--config", cfg(doc), "--output", str(out)])
    assert code == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == ["t", "tau", "phi", "speed", "k1_m1", "k2_m2"]
    assert rows[1][:3] == ["0", "1", "0"]
    ts = [float(r[0]) for r in rows[1:]]
    assert ts == sorted(ts)
    jsonschema.validate(json.loads(stdout), RESULT_SCHEMA)


def test_simulate_resampled(capsys, cfg, tmp_path):
    out = tmp_path / "traj.csv"
    run(capsys, ["simulate", "--config", cfg(SPHERE), "--set", "output.samples=5",
                 "--output", str(out)])
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert len(rows) == 6


def test_simulate_json_output(capsys, cfg, tmp_path):
    out = tmp_path / "traj.json"
    run(capsys, ["simulate", "--config", cfg(SPHERE), "--format", "json", "--output", str(out)])
    doc = json.loads(out.read_text())
    assert doc["columns"][:4] == ["t", "tau", "phi", "speed"]
    jsonschema.validate(doc["terminal"], RESULT_SCHEMA)


def test_deterministic_output(capsys, cfg, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        run(capsys, ["simulate", "--config", cfg(SPHERE), "--output", str(path), "--no-timing"])
    assert a.read_bytes() == b.read_bytes()
    first = run(capsys, ["collapse", "--config", cfg(SPHERE), "--no-timing"])[1]
    second = run(capsys, ["collapse", "--config", cfg(SPHERE), "--no-timing"])[1]
    assert first == second


def test_sweep_grid(capsys, cfg):
    code, out, _ = run(capsys, ["sweep", "--config", cfg(SPHERE), "--range", "tau0=0.25,0.5,1",
                                "--range", "ambient.dim=3,6"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6
    for row in rows:
        n = int(row["ambient.dim"]) - 1
        R = float(row["tau0"])
        assert float(row["T"]) == pytest.approx(R**3 / (3 * n), rel=1e-10)


def test_sweep_parallel_matches_serial(capsys, cfg):
    args = ["sweep", "--config", cfg(SPHERE), "--range", "tau0=0.3,0.6,0.9", "--format", "json"]
    serial = run(capsys, args)[1]
    parallel = run(capsys, args + ["--jobs", "2"])[1]
    assert serial == parallel


def test_sweep_without_range_is_config_error(capsys, cfg):
    assert run(capsys, ["sweep", "--config", cfg(SPHERE)])[0] == EXIT_CONFIG


def test_avoidance_command(capsys, cfg, tmp_path):
    doc = {"ambient": {"kind": "space_form", "eps": 0, "dim": 4},
           "weingarten": {"kind": "H", "r": 1},
           "scenario": {"kind": "concentric", "tau_outer": 1.2, "tau_inner": 0.6}, "grid": 50}
    out = tmp_path / "curve.csv"
    code, stdout, _ = run(capsys, ["avoidance", "--config", cfg(doc), "--output", str(out)])
    assert code == EXIT_OK
    summary = json.loads(stdout)
    assert summary["monotone"] and summary["justification"] == "odd"
    assert out.read_text().startswith("t,D\n")
    assert len(out.read_text().splitlines()) == 51


def test_avoidance_bad_scenario(capsys, cfg):
    doc = {"ambient": {"kind": "space_form", "eps": 0, "dim": 4},
           "weingarten": {"kind": "H", "r": 1},
           "scenario": {"kind": "concentric", "tau_outer": 0.2}}
    code, _, err = run(capsys, ["avoidance", "--config", cfg(doc)])
    assert code == EXIT_CONFIG and "scenario.tau_inner" in err


def test_verify_single_suite(capsys):
    code, out, _ = run(capsys, ["verify", "--suite", "axioms"])
    assert code == EXIT_OK
    assert out.splitlines()[-1].startswith("10/10 checks passed")


def test_verify_check_failure_exit_code(capsys, monkeypatch):
    from weingarten_flow import cli, verify
    monkeypatch.setattr(cli, "run_verify", lambda *a, **k: [verify.Check("x", "broken", False)])
    assert run(capsys, ["verify"])[0] == EXIT_CHECK


def test_families_catalogue(capsys):
    code, out, _ = run(capsys, ["families"])
    assert code == 0 and "munzner" in out and "cot(tau + (i-1) pi/g)" in out


def test_float_formatting_round_trips():
    for x in (0.1, 1 / 3, 1e-300, 2.0**-1074, 123456789.123456789):
        assert float(fmt_float(x)) == x
    assert dumps({"a": 1.0, "b": float("nan")}) == '{\n  "a": 1.0,\n  "b": null\n}\n'


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "weingarten_flow", "families"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "horosphere" in proc.stdout
