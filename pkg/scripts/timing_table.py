"""Duration estimates for NOON and general targets at both parameter sets."""
import argparse

from resonator_synth.experiments import ExperimentConfig, emit_results, run_timing_table


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-n", type=int, default=8)
    ap.add_argument("--out", default="results/timing_table")
    args = ap.parse_args()
    cfg = ExperimentConfig.from_dict({"experiment": "timing", "timing": {"max_N": args.max_n}})
    table = run_timing_table(cfg)
    emit_results(table, args.out)
    print(f"{'set':9s} {'N_a':>3s} {'N_b':>3s} {'NOON ns':>9s} {'general ns':>11s}")
    for r in table.rows:
        if r["N_a"] == r["N_b"]:
            mark = f"  quoted {r['quoted_ns']:.0f} ns, off by {r['rel_error']:.1%}" if r["quoted_ns"] else ""
            print(f"{r['param_set']:9s} {r['N_a']:3d} {r['N_b']:3d} {r['noon_ns']:9.1f} {r['general_ns']:11.1f}{mark}")


if __name__ == "__main__":
    main()
