"""Print the NOON(3,3) pulse sequence and the state after every pulse."""
import argparse
import warnings
from pathlib import Path

from resonator_synth import compiler, formats
from resonator_synth.dispersive import scan_params
from resonator_synth.experiments import validate_noon_trajectory
from resonator_synth.fock import StateVector
from resonator_synth.units import to_ghz, to_ns


def fmt_state(psi, tol=1e-9):
    terms = []
    for idx, amp in enumerate(psi.amplitudes):
        if abs(amp) > tol:
            q, a, b = psi.space.triple(idx)
            terms.append(f"({amp.real:+.3f}{amp.imag:+.3f}j)|{q},{a},{b}>")
    return " ".join(terms)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results/noon_trajectory")
    args = ap.parse_args()
    p = scan_params()
    rows = []
    seq = compiler.compile_noon(3, 3, p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sched = compiler.lower_schedule(seq, p, ramp=0.0)
    pulses = [s for s in sched.segments if type(s).__name__ != "Shift"]
    state = StateVector.vacuum(p.space)
    for g, seg, (_, _, _, err) in zip(seq.gates, pulses, validate_noon_trajectory(p)):
        state = compiler.apply_gate(g, state)
        rows.append((str(g), to_ns(seg.duration), fmt_state(state), err))
        extra = f" at {to_ghz(seg.omega_d):.4f} GHz" if g.kind == "R" else ""
        print(f"{str(g):32s} {to_ns(seg.duration):7.2f} ns{extra:17s} err {err:.1e}  {fmt_state(state)}")
    text = formats._csv_text(("gate", "duration_ns", "state", "max_error"), rows)
    formats.write_text(Path(args.out) / "noon_trajectory.csv", text)
    print(f"gate time {to_ns(sched.metadata['gate_time']):.2f} ns, "
          f"estimate {to_ns(compiler.estimate_duration_noon(3, 3, p)):.2f} ns")


if __name__ == "__main__":
    main()
