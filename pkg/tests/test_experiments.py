import json
import math

import numpy as np
import pytest

from resonator_synth import experiments, formats
from resonator_synth.compiler import make_target
from resonator_synth.errors import ConfigError
from resonator_synth.experiments import (ExperimentConfig, ScanResult, autotune_drive, emit_results,
                                         max_transition_probabilities, run_selectivity_scan,
                                         run_synthesis, run_timing_table, validate_noon_trajectory)
from resonator_synth.hamiltonian import dressed_transition_frequency
from resonator_synth.units import mhz, to_ghz

from conftest import quiet_params


def synth_config(target, n_a=3, n_b=3, **system):
    cfg = ExperimentConfig.from_dict({"experiment": "synth", "system": system,
                                      "synth": {"target": target, "N_a": n_a, "N_b": n_b}})
    return cfg


# -- configuration ------------------------------------------------------------------

def test_config_defaults_are_the_scan_parameters():
    cfg = ExperimentConfig()
    p = cfg.system
    assert to_ghz(p.omega_q) == pytest.approx(7.0)
    assert p.Omega == pytest.approx(mhz(7.0))
    assert cfg.scan.grid == (4, 4) and cfg.scan.drive_freq == "autotune"


def test_config_load_and_echo(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"experiment": "scan", "seed": 5,
                                "system": {"g_a_MHz": 60.0, "g_b_MHz": 60.0, "na_max": 4},
                                "scan": {"grid": [3, 3], "drive_freq": "literal"}}))
    cfg = ExperimentConfig.load(path)
    assert cfg.seed == 5 and cfg.scan.grid == (3, 3)
    assert cfg.system.g_a == pytest.approx(mhz(60.0))
    echo = cfg.to_dict()
    assert echo["system"]["g_a_MHz"] == pytest.approx(60.0)
    again = ExperimentConfig.from_dict(json.loads(json.dumps(echo)))
    assert again.to_dict() == echo


@pytest.mark.parametrize("data, match", [
    ({"sytem": {}}, "unknown config keys"),
    ({"system": {"omega_c_GHz": 5}}, "unknown system keys"),
    ({"scan": {"resolution": 3}}, "unknown ScanSettings"),
    ({"experiment": "sweep"}, "unknown experiment"),
    ({"scan": {"drive_freq": "guess"}}, "drive_freq"),
    ({"synth": {"modes": ["ideal", "quantum"]}}, "modes"),
    ({"synth": {"target": "file", "target_file": "nowhere.csv"}}, "does not exist"),
])
def test_config_errors(data, match):
    with pytest.raises(ConfigError, match=match):
        ExperimentConfig.from_dict(data)


def test_missing_or_malformed_config_file(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.load(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(bad)


def test_out_of_range_frequency_warns():
    with pytest.warns(UserWarning, match="GHz range"):
        ExperimentConfig.from_dict({"system": {"omega_a_GHz": 0.05, "omega_b_GHz": 0.09,
                                               "omega_q_GHz": 0.07, "g_a_MHz": 1, "g_b_MHz": 1,
                                               "Omega_MHz": 0.1}})


def test_target_file_resolved_relative_to_config(tmp_path):
    (tmp_path / "t.csv").write_text(formats.target_to_csv(make_target("noon", 1, 2)))
    (tmp_path / "cfg.json").write_text(json.dumps(
        {"experiment": "synth", "synth": {"target": "file", "target_file": "t.csv"}}))
    cfg = ExperimentConfig.load(tmp_path / "cfg.json")
    rep = run_synthesis(cfg)
    assert rep.n_gates == 6 and rep.fidelity_ideal >= 1 - 1e-9


# -- selectivity scan --------------------------------------------------------------

@pytest.fixture(scope="module")
def default_scan():
    return run_selectivity_scan(ExperimentConfig())


def test_scan_separates_the_diagonal(default_scan):
    on, off = default_scan.on_diagonal(), default_scan.off_diagonal()
    assert len(on) == 2 and len(off) == 14
    assert min(on) >= 0.9
    assert max(off) <= 0.3
    assert min(on) > max(off)
    assert all(0.0 <= v <= 1.0 for v in on + off)


def test_scan_metadata(default_scan):
    m = default_scan.metadata
    assert m["window_ns"] == pytest.approx(1.5 * 1e3 / 7.0)
    assert m["steps"] == 2000
    assert abs(m["omega_d_GHz"] - m["nominal_GHz"]) <= 0.005
    assert m["nominal_GHz"] == pytest.approx(7.028)


def test_literal_drive():
    cfg = ExperimentConfig()
    cfg.scan.drive_freq = "literal"
    res = run_selectivity_scan(cfg)
    assert res.metadata["omega_d_GHz"] == pytest.approx(7.025)
    assert min(res.on_diagonal()) > max(res.off_diagonal())


def test_weak_drive_narrows_the_line():
    cfg = ExperimentConfig.from_dict({"system": {"Omega_MHz": 0.5}})
    res = run_selectivity_scan(cfg)
    assert max(res.off_diagonal()) < 0.01


def test_single_cell_at_its_own_resonance(scan_p):
    times = np.linspace(0, 1.5 * 2 * math.pi / scan_p.Omega, 2001)
    w = dressed_transition_frequency(scan_p, 2, 0)
    assert max_transition_probabilities(scan_p, w, [(2, 0)], times, basis="dressed")[0] >= 0.99
    # bare labels carry a few percent of dressing admixture
    bare = max_transition_probabilities(scan_p, w, [(2, 0)], times)[0]
    assert 0.9 < bare < 0.99


def test_two_level_limit_without_coupling():
    # with no coupling every cell is a bare two-level Rabi problem
    p = quiet_params(6.3, 7.7, 7.0, 0.0, 0.0, 7.0, 2, 2)
    times = np.linspace(0, 1.5 * 2 * math.pi / p.Omega, 2001)
    delta = mhz(3.0)
    got = max_transition_probabilities(p, p.omega_q + delta, [(0, 0), (1, 2)], times)
    want = p.Omega**2 / (p.Omega**2 + delta**2)
    assert np.allclose(got, want, atol=1e-4)


def test_autotune_stays_in_window(scan_p):
    times = np.linspace(0, 1.5 * 2 * math.pi / scan_p.Omega, 501)
    w = autotune_drive(scan_p, 2, [(2, 0), (3, 1)], times, mhz(5.0))
    assert abs(w - (scan_p.omega_q + 2 * mhz(14.0))) <= mhz(5.0)


def test_scan_needs_a_guard_level():
    cfg = ExperimentConfig.from_dict({"system": {"na_max": 3, "nb_max": 5}})
    with pytest.raises(ConfigError, match="guard"):
        run_selectivity_scan(cfg)


def test_scan_basis_option():
    cfg = ExperimentConfig.from_dict({"scan": {"basis": "dressed", "grid": [3, 2]}})
    res = run_selectivity_scan(cfg)
    assert res.metadata["basis"] == "dressed"
    assert min(res.on_diagonal()) >= 0.99
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"scan": {"basis": "polar"}})


def test_empty_grid_gives_header_only_csv(tmp_path):
    cfg = ExperimentConfig.from_dict({"scan": {"grid": [0, 0]}})
    res = run_selectivity_scan(cfg)
    emit_results(res, tmp_path)
    assert (tmp_path / "scan.csv").read_text() == "n_a,n_b,max_prob\n"


def test_scan_output_is_deterministic(tmp_path, default_scan):
    emit_results(default_scan, tmp_path / "a")
    emit_results(run_selectivity_scan(ExperimentConfig()), tmp_path / "b")
    a = (tmp_path / "a" / "scan.csv").read_bytes()
    assert a == (tmp_path / "b" / "scan.csv").read_bytes()
    assert (tmp_path / "a" / "scan.meta.json").read_bytes() == (tmp_path / "b" / "scan.meta.json").read_bytes()
    assert len(a.decode().splitlines()) == 17


def test_scan_result_array():
    res = ScanResult({(0, 0): 0.1, (1, 0): 0.9}, {"grid": [2, 1], "diagonal": 1})
    assert np.allclose(res.as_array(), [[0.1], [0.9]])
    assert res.on_diagonal() == [0.9]


# -- synthesis -------------------------------------------------------------------------

def test_synth_noon_ideal():
    rep = run_synthesis(synth_config("noon"))
    assert rep.n_gates == 12
    assert rep.fidelity_ideal >= 1 - 1e-9
    assert rep.gate_time * 1e9 == pytest.approx(409.17, abs=0.01)
    assert rep.estimated_duration == pytest.approx(rep.gate_time, rel=1e-12)
    assert rep.schedule_duration > rep.gate_time
    assert rep.fidelity_full is None
    assert len(rep.trajectory) == len(rep.schedule.segments)


def test_synth_vacuum():
    rep = run_synthesis(synth_config("vacuum"))
    assert rep.n_gates == 0 and rep.fidelity_ideal == pytest.approx(1.0)


def test_synth_random_target_budget():
    cfg = synth_config("random", 4, 4)
    cfg.seed = 17
    rep = run_synthesis(cfg)
    assert rep.fidelity_ideal >= 1 - 1e-6
    assert {k: rep.gate_counts[k] for k in "ABR"} == {"A": 4, "B": 20, "R": 24}
    again = run_synthesis(cfg)
    assert again.summary() == rep.summary()


def test_synth_max_entangled():
    rep = run_synthesis(synth_config("max-entangled", 2, 2))
    assert rep.fidelity_ideal >= 1 - 1e-9


def test_synth_full_mode_is_reported():
    cfg = ExperimentConfig.from_dict({"experiment": "synth",
                                      "system": {"Omega_MHz": 3.5, "na_max": 2, "nb_max": 2},
                                      "synth": {"N_a": 1, "N_b": 1, "modes": ["ideal", "full"],
                                                "ramp_ns": 0.0}})
    rep = run_synthesis(cfg)
    assert 0.0 <= rep.fidelity_full <= 1.0
    assert rep.fidelity_full > 0.5
    assert "fidelity_full_vs_ideal" in rep.trajectory[0]


def test_synth_output_files(tmp_path):
    rep = run_synthesis(synth_config("noon", 2, 1))
    files = emit_results(rep, tmp_path)
    names = sorted(f.name for f in files)
    assert names == ["gates.json", "schedule.json", "synth.json", "trajectory.csv"]
    summary = json.loads((tmp_path / "synth.json").read_text())
    assert summary["n_pulses"] == 6


# -- timing ---------------------------------------------------------------------------

def test_timing_table_flags_quoted_values():
    table = run_timing_table()
    est = table.lookup("estimate", 8, 8)
    fig = table.lookup("scan", 3, 3)
    assert est["noon_ns"] == pytest.approx(366.84, abs=0.01) and est["quoted_ns"] == 360.0
    assert fig["noon_ns"] == pytest.approx(409.17, abs=0.01) and fig["quoted_ns"] == 410.0
    assert est["within_tolerance"] and fig["within_tolerance"]
    assert len(table.flagged()) == 2


def test_timing_table_is_monotone():
    table = run_timing_table()
    for name in ("estimate", "scan"):
        grid = {(r["N_a"], r["N_b"]): r for r in table.rows if r["param_set"] == name}
        for (na, nb), r in grid.items():
            for nxt in [(na + 1, nb), (na, nb + 1)]:
                if nxt in grid:
                    assert grid[nxt]["noon_ns"] > r["noon_ns"]
                    assert grid[nxt]["general_ns"] > r["general_ns"]


def test_timing_csv(tmp_path):
    files = emit_results(run_timing_table(), tmp_path)
    lines = files[0].read_text().splitlines()
    assert lines[0].startswith("param_set,g_MHz")
    assert len(lines) == 1 + 2 * 64


def test_emit_rejects_unknown(tmp_path):
    with pytest.raises(TypeError):
        emit_results(object(), tmp_path)


# -- table trajectory -----------------------------------------------------------------

def test_noon_trajectory_rows():
    rows = validate_noon_trajectory()
    assert len(rows) == 12
    assert max(r[3] for r in rows) <= 1e-9


def test_golden_states_are_normalized():
    for _, comps in experiments.NOON3_TRAJECTORY:
        assert sum(abs(v) ** 2 for v in comps.values()) == pytest.approx(1.0)
