"""File formats shared by the library and the command line driver.

Everything on disk uses cyclic units (GHz, MHz) and nanoseconds; conversion to
rad/s and seconds happens here.  Writers are deterministic: fixed key order,
``repr`` floats, ``\\n`` line endings.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .compiler import GateSequence, TargetSpec
from .dispersive import SystemParams
from .fock import HilbertSpace, StateVector
from .hamiltonian import PulseSchedule, Rabi, ResonantA, ResonantB, Shift, VirtualPhase
from .units import ghz, mhz, ns, to_ghz, to_mhz, to_ns

AMPLITUDE_CUTOFF = 1e-12


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_text(path, text: str):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
    return path


def read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise OSError(f"could not read {path}: {exc}") from exc


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- states ---------------------------------------------------------------

def state_records(psi: StateVector, cutoff: float = AMPLITUDE_CUTOFF) -> list:
    """Records (q, n_a, n_b, re, im), skipping amplitudes below ``cutoff``."""
    out = []
    for idx, amp in enumerate(psi.amplitudes):
        if abs(amp) < cutoff:
            continue
        q, n_a, n_b = psi.space.triple(idx)
        out.append((q, n_a, n_b, float(amp.real), float(amp.imag)))
    return out


def state_to_csv(psi: StateVector) -> str:
    return _csv_text(("q", "n_a", "n_b", "re", "im"), state_records(psi))


def state_from_csv(text: str, space: HilbertSpace) -> StateVector:
    comps = {}
    for row in csv.DictReader(io.StringIO(text)):
        key = (int(row["q"]), int(row["n_a"]), int(row["n_b"]))
        comps[key] = comps.get(key, 0) + complex(float(row["re"]), float(row["im"]))
    return StateVector.from_components(space, comps, normalize=False)


# -- targets -----------------------------------------------------------------

def target_to_csv(target: TargetSpec) -> str:
    rows = []
    for (n_a, n_b), c in np.ndenumerate(target.coefficients):
        if abs(c) >= AMPLITUDE_CUTOFF:
            rows.append((n_a, n_b, float(c.real), float(c.imag)))
    return _csv_text(("n_a", "n_b", "re", "im"), rows)


def target_from_csv(text: str, label: str = "general") -> TargetSpec:
    entries = []
    for row in csv.DictReader(io.StringIO(text)):
        n_a, n_b = int(row["n_a"]), int(row["n_b"])
        if n_a < 0 or n_b < 0:
            raise ValueError(f"negative photon number in target record ({n_a}, {n_b})")
        entries.append((n_a, n_b, complex(float(row["re"]), float(row["im"]))))
    if not entries:
        raise ValueError("target file has no records")
    na = max(e[0] for e in entries)
    nb = max(e[1] for e in entries)
    c = np.zeros((na + 1, nb + 1), dtype=complex)
    for n_a, n_b, v in entries:
        c[n_a, n_b] += v
    return TargetSpec(c, label)


def load_target(path) -> TargetSpec:
    return target_from_csv(read_text(path), label=Path(path).stem)


# -- gate sequences --------------------------------------------------------------

def sequence_to_json(seq: GateSequence) -> str:
    return dump_json({"label": seq.label, "na_max": seq.space.na_max,
                      "nb_max": seq.space.nb_max, "gates": seq.records()})


# -- schedules -------------------------------------------------------------------

def segment_record(seg, p: SystemParams) -> dict:
    if isinstance(seg, Shift):
        rec = {"kind": "Shift", "duration_ns": to_ns(seg.duration), "omega_q_GHz": to_ghz(seg.target),
               "ramp_ns": to_ns(seg.ramp), "hold_ns": to_ns(seg.hold)}
    elif isinstance(seg, (ResonantA, ResonantB)):
        w = p.omega_a if isinstance(seg, ResonantA) else p.omega_b
        rec = {"kind": type(seg).__name__, "duration_ns": to_ns(seg.duration), "omega_q_GHz": to_ghz(w)}
    elif isinstance(seg, Rabi):
        rec = {"kind": "Rabi", "duration_ns": to_ns(seg.duration), "omega_q_GHz": to_ghz(p.omega_q),
               "omega_d_GHz": to_ghz(seg.omega_d), "phase_rad": seg.phase,
               "amplitude_MHz": to_mhz(seg.amplitude)}
    elif isinstance(seg, VirtualPhase):
        table = [[q, a, b, ph] for (q, a, b), ph in sorted(seg.phases.items())]
        rec = {"kind": "VirtualPhase", "duration_ns": 0.0, "phase_table": table}
    else:
        raise TypeError(f"unknown segment type {type(seg).__name__}")
    rec["gate_index"] = seg.gate_index
    return rec


def segment_from_record(rec: dict, p: SystemParams):
    kind = rec["kind"]
    gi = rec.get("gate_index")
    if kind == "Shift":
        ramp = ns(rec.get("ramp_ns", rec["duration_ns"]))
        return Shift(ghz(rec["omega_q_GHz"]), ramp, ns(rec.get("hold_ns", 0.0)), gi)
    if kind == "ResonantA":
        return ResonantA(ns(rec["duration_ns"]), gi)
    if kind == "ResonantB":
        return ResonantB(ns(rec["duration_ns"]), gi)
    if kind == "Rabi":
        return Rabi(ns(rec["duration_ns"]), ghz(rec["omega_d_GHz"]), float(rec["phase_rad"]),
                    mhz(rec["amplitude_MHz"]), gi)
    if kind == "VirtualPhase":
        return VirtualPhase({(int(q), int(a), int(b)): float(ph) for q, a, b, ph in rec["phase_table"]}, gi)
    raise ValueError(f"unknown segment kind {kind!r}")


def schedule_to_json(sched: PulseSchedule) -> str:
    return dump_json([segment_record(s, sched.params) for s in sched.segments])


def schedule_from_json(text: str, p: SystemParams) -> PulseSchedule:
    sched = PulseSchedule(p, [segment_from_record(r, p) for r in json.loads(text)])
    sched.validate()
    return sched
