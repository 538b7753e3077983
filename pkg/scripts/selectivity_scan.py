"""Stark-shifted Rabi scan over a grid of Fock nodes, printed as a table.

    python scripts/selectivity_scan.py [--grid 6] [--drive-freq autotune|literal] [--basis bare|dressed] [--out DIR]
"""
import argparse

from resonator_synth.experiments import ExperimentConfig, emit_results, run_selectivity_scan


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=4)
    ap.add_argument("--drive-freq", choices=("autotune", "literal"), default="autotune")
    ap.add_argument("--basis", choices=("bare", "dressed"), default="bare")
    ap.add_argument("--diagonal", type=int, default=2)
    ap.add_argument("--out", default="results/selectivity_scan")
    args = ap.parse_args()

    n = args.grid
    cfg = ExperimentConfig.from_dict({
        "system": {"na_max": n + 1, "nb_max": n + 1},
        "scan": {"grid": [n, n], "drive_freq": args.drive_freq, "basis": args.basis,
                 "diagonal": args.diagonal},
    })
    res = run_selectivity_scan(cfg)
    grid = res.as_array()
    emit_results(res, args.out)
    m = res.metadata
    print(f"drive {m['omega_d_GHz']:.5f} GHz ({m['drive_freq']}), nominal {m['nominal_GHz']:.5f} GHz, "
          f"window {m['window_ns']:.1f} ns")
    print("n_b\\n_a " + " ".join(f"{a:6d}" for a in range(n)))
    for b in reversed(range(n)):
        print(f"{b:7d} " + " ".join(f"{grid[a, b]:6.3f}" for a in range(n)))


if __name__ == "__main__":
    main()
