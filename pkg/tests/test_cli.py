import json
import subprocess
import sys

import pytest

from resonator_synth import cli, experiments
from resonator_synth.errors import CompilationError, NumericalError


def run(tmp_path, *args):
    return cli.main(list(args) + ["--out", str(tmp_path)])


def manifest(path):
    return json.loads((path / "manifest.json").read_text())


def test_validate_noon_trajectory(tmp_path, capsys):
    assert run(tmp_path, "validate-table1") == cli.EXIT_OK
    assert "max error" in capsys.readouterr().out
    m = manifest(tmp_path)
    assert m["command"] == "validate-table1" and m["status"] == "ok"
    assert set(m["versions"]) == {"resonator_synth", "python", "numpy", "scipy"}
    assert m["wall_time_s"] >= 0
    assert (tmp_path / "noon_trajectory.csv").exists()


def test_timing(tmp_path, capsys):
    assert run(tmp_path, "timing") == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "360 ns" in out and "410 ns" in out


def test_timing_tolerance_failure(tmp_path, monkeypatch):
    monkeypatch.setitem(experiments.QUOTED_TIMINGS_NS, ("scan", 3, 3), 300.0)
    assert run(tmp_path, "timing") == cli.EXIT_NUMERIC
    assert manifest(tmp_path)["status"] == "exit 4"


def test_scan_with_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"scan": {"grid": [3, 1]}}))
    out = tmp_path / "out"
    assert cli.main(["scan", "--config", str(cfg), "--drive-freq", "literal", "--out", str(out)]) == 0
    assert len((out / "scan.csv").read_text().splitlines()) == 4
    m = manifest(out)
    assert m["config"]["scan"]["drive_freq"] == "literal"
    assert m["files"] == ["scan.csv", "scan.meta.json"]


def test_synth_seeded(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"synth": {"target": "random", "N_a": 2, "N_b": 2}}))
    for sub in ("a", "b"):
        assert cli.main(["synth", "--config", str(cfg), "--seed", "3", "--out", str(tmp_path / sub)]) == 0
    for name in ("synth.json", "gates.json", "schedule.json", "trajectory.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert manifest(tmp_path / "a")["config"]["seed"] == 3


def test_synth_full_mode(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"system": {"na_max": 2, "nb_max": 2},
                               "synth": {"N_a": 1, "N_b": 1, "ramp_ns": 0.0}}))
    assert cli.main(["synth", "--config", str(cfg), "--mode", "full", "--out", str(tmp_path / "o")]) == 0
    assert "fidelity full" in capsys.readouterr().out


def test_config_error_exit_code(tmp_path, capsys):
    assert run(tmp_path, "scan", "--config", str(tmp_path / "nope.json")) == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_compilation_failure_exit_code(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"system": {"na_max": 2, "nb_max": 2}, "synth": {"N_a": 4, "N_b": 1}}))
    assert cli.main(["synth", "--config", str(cfg), "--out", str(tmp_path / "o")]) == cli.EXIT_COMPILE
    assert manifest(tmp_path / "o")["status"] == "exit 2"


@pytest.mark.parametrize("exc, code", [(CompilationError("stuck", node=(1, 1), residual=0.1), 2),
                                       (NumericalError("drift", segment_index=3), 4)])
def test_error_mapping(tmp_path, monkeypatch, exc, code):
    def boom(cfg):
        raise exc
    monkeypatch.setattr(experiments, "run_synthesis", boom)
    assert run(tmp_path, "synth") == code


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "resonator_synth.cli", "timing", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "timing.csv").exists()


def test_unknown_verb():
    with pytest.raises(SystemExit):
        cli.main(["dance"])
