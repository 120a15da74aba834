import json
import subprocess
import sys

import pytest

from forerunner import cli, scenarios
from forerunner.io import SpecError, read_field_csv, read_json
from forerunner.scenarios import resolve_spec


def write_spec(tmp_path, name="spec.json", **kw):
    path = tmp_path / name
    path.write_text(json.dumps(kw))
    return path


# -- spec resolution ----------------------------------------------------------------

def test_resolve_fills_defaults_and_coerces():
    spec = resolve_spec({"scenario": "fig1_density_vs_x", "output_path": "o", "n_x": "20", "times": 300})
    assert spec.params["n_x"] == 20
    assert spec.params["times"] == [300.0]
    assert spec.params["omega0"] == 0.99


def test_nested_and_flat_layouts_agree():
    a = resolve_spec({"scenario": "sweep", "output_path": "o", "params": {"v1s": [0.1]}})
    b = resolve_spec({"scenario": "sweep", "output_path": "o", "v1s": [0.1]})
    assert a == b


def test_resolve_collects_all_problems():
    with pytest.raises(SpecError) as info:
        resolve_spec({"scenario": "fig2_density_vs_t", "bogus": 1, "x": "nan", "n_t": 2.5})
    msg = str(info.value)
    for part in ("output_path", "bogus", "x: must be finite", "n_t"):
        assert part in msg


def test_unknown_scenario():
    with pytest.raises(SpecError):
        resolve_spec({"scenario": "fig9", "output_path": "o"})


def test_sweep_method_restricted():
    with pytest.raises(SpecError):
        resolve_spec({"scenario": "sweep", "output_path": "o", "method": "numeric_grid"})


# -- scenario runs ------------------------------------------------------------------

def small_fig1(tmp_path, out="run"):
    return write_spec(tmp_path, scenario="fig1_density_vs_x", output_path=str(tmp_path / out),
                      n_x=25, times=[250.0, 300.0])


def test_scenario_run_writes_field_and_summary(tmp_path, capsys):
    assert cli.main(["scenario", "run", str(small_fig1(tmp_path))]) == cli.EXIT_OK
    printed = capsys.readouterr().out.split()
    assert any(p.endswith("summary.json") for p in printed)
    summary = read_json(tmp_path / "run" / "summary.json")
    assert summary["spec"]["params"]["n_x"] == 25
    csvs = [f for f in summary["files"] if f.endswith(".csv")]
    field = read_field_csv(tmp_path / "run" / csvs[0])
    assert field.values.shape[0] == 25


def test_scenario_outputs_are_byte_identical(tmp_path):
    spec = small_fig1(tmp_path)
    assert cli.main(["scenario", "run", str(spec)]) == 0
    first = {p.name: p.read_bytes() for p in (tmp_path / "run").iterdir()}
    assert cli.main(["scenario", "run", str(spec)]) == 0
    second = {p.name: p.read_bytes() for p in (tmp_path / "run").iterdir()}
    assert first == second


def test_key_value_spec_file(tmp_path):
    spec = tmp_path / "s.cfg"
    spec.write_text(f"scenario = fig2_density_vs_t\noutput_path = {tmp_path / 'kv'}\nn_t = 20\nv1s = 0.01,\n")
    assert cli.main(["scenario", "run", str(spec)]) == 0
    assert read_json(tmp_path / "kv" / "summary.json")["spec"]["params"]["v1s"] == [0.01]


def test_sweep_subcommand(tmp_path):
    spec = write_spec(tmp_path, output_path=str(tmp_path / "sw"), v1s=[0.1], omega0s=[0.9], factors=[10.0])
    assert cli.main(["sweep", str(spec)]) == 0
    summary = read_json(tmp_path / "sw" / "summary.json")
    assert summary["spec"]["scenario"] == "sweep"


def test_spec_error_exit_code(tmp_path, capsys):
    spec = write_spec(tmp_path, scenario="fig1_density_vs_x")
    assert cli.main(["scenario", "run", str(spec)]) == cli.EXIT_SPEC
    assert "output_path" in capsys.readouterr().err
    assert cli.main(["scenario", "run", str(tmp_path / "absent.json")]) == cli.EXIT_SPEC


def test_compute_error_exit_code(tmp_path, monkeypatch):
    def boom(p, out):
        raise FloatingPointError("synthetic failure")

    monkeypatch.setitem(scenarios.RUNNERS, "fig1_density_vs_x", boom)
    assert cli.main(["scenario", "run", str(small_fig1(tmp_path))]) == cli.EXIT_COMPUTE


# -- acceptance entry point ---------------------------------------------------------

def test_accept_pass(tmp_path):
    report = tmp_path / "r.json"
    assert cli.main(["accept", "special_functions", "--report", str(report)]) == cli.EXIT_OK
    rep = read_json(report)
    assert rep["passed"] and {r["id"] for r in rep["results"]} == {"SF1", "SF2", "SF3"}


def test_accept_unknown_suite():
    assert cli.main(["accept", "nonsense"]) == cli.EXIT_SPEC


def test_accept_failure_exit_code(monkeypatch):
    from forerunner import acceptance

    failing = acceptance.CheckResult("X", "always red", 1.0, 0.0, False)
    monkeypatch.setitem(acceptance.SUITES, "special_functions", (lambda: failing,))
    assert cli.main(["accept", "special_functions"]) == cli.EXIT_ACCEPT


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "forerunner", "accept", "nonsense"], capture_output=True, text=True)
    assert res.returncode == 2
    assert "unknown suite" in res.stderr
