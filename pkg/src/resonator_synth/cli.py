"""Command line driver.

    resonator-synth scan   [--config C] [--drive-freq autotune|literal] [--out DIR]
    resonator-synth synth  [--config C] [--mode ideal|full] [--seed N] [--out DIR]
    resonator-synth timing [--config C] [--out DIR]
    resonator-synth validate-table1 [--out DIR]

Exit codes: 0 success, 2 compilation failure, 3 config error, 4 numerical
tolerance failure.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from . import experiments, formats
from .errors import CompilationError, ConfigError, NumericalError, PreconditionError

EXIT_OK = 0
EXIT_COMPILE = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4

IDEAL_FIDELITY_FLOOR = 1 - 1e-6
TRAJECTORY_TOLERANCE = 1e-9


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="resonator-synth", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="JSON experiment config")
        p.add_argument("--out", type=Path, help="output directory (default: results/<verb>)")
        p.add_argument("--seed", type=int, help="seed for randomized targets")
        return p

    scan = common(sub.add_parser("scan", help="Stark-shifted Rabi selectivity scan"))
    scan.add_argument("--drive-freq", choices=("autotune", "literal"))
    synth = common(sub.add_parser("synth", help="compile, lower and propagate a target state"))
    synth.add_argument("--mode", choices=("ideal", "full"), default="ideal",
                       help="'full' also integrates the complete Hamiltonian")
    common(sub.add_parser("timing", help="duration estimate tables"))
    common(sub.add_parser("validate-table1", help="check the NOON(3,3) trajectory"))
    return parser


def _load(args, experiment: str) -> experiments.ExperimentConfig:
    if args.config is not None:
        cfg = experiments.ExperimentConfig.load(args.config)
    else:
        cfg = experiments.ExperimentConfig()
    cfg.experiment = experiment
    if args.seed is not None:
        cfg.seed = args.seed
    if getattr(args, "drive_freq", None):
        cfg.scan.drive_freq = args.drive_freq
    if getattr(args, "mode", None) == "full" and "full" not in cfg.synth.modes:
        cfg.synth.modes = tuple(cfg.synth.modes) + ("full",)
    out = args.out or (Path(cfg.out) if cfg.out else Path("results") / args.verb)
    cfg.out = str(out)
    cfg.check()
    return cfg


def _report(line: str):
    print(line, flush=True)


def cmd_scan(cfg) -> tuple[int, list]:
    res = experiments.run_selectivity_scan(cfg)
    files = experiments.emit_results(res, cfg.out)
    on, off = res.on_diagonal(), res.off_diagonal()
    _report(f"drive {res.metadata['omega_d_GHz']:.6f} GHz ({res.metadata['drive_freq']})")
    if on:
        _report(f"on-diagonal min {min(on):.4f}" + (f", off-diagonal max {max(off):.4f}" if off else ""))
    return EXIT_OK, files


def cmd_synth(cfg) -> tuple[int, list]:
    rep = experiments.run_synthesis(cfg)
    files = experiments.emit_results(rep, cfg.out)
    s = rep.summary()
    _report(f"{s['label']}: {s['n_pulses']} pulses {s['gate_counts']}, corrections {s['corrections']}")
    _report(f"gate time {s['gate_time_ns']:.2f} ns (estimate {s['estimated_duration_ns']:.2f} ns), "
            f"schedule {s['schedule_duration_ns']:.2f} ns")
    _report(f"fidelity ideal {rep.fidelity_ideal:.12f}")
    if rep.fidelity_full is not None:
        _report(f"fidelity full {rep.fidelity_full:.6f}")
    code = EXIT_OK if rep.fidelity_ideal >= IDEAL_FIDELITY_FLOOR else EXIT_NUMERIC
    return code, files


def cmd_timing(cfg) -> tuple[int, list]:
    table = experiments.run_timing_table(cfg)
    files = experiments.emit_results(table, cfg.out)
    ok = True
    for r in table.flagged():
        _report(f"{r['param_set']} ({r['N_a']},{r['N_b']}): {r['noon_ns']:.1f} ns vs quoted "
                f"{r['quoted_ns']:.0f} ns, rel. error {r['rel_error']:.3%}")
        ok &= bool(r["within_tolerance"])
    return (EXIT_OK if ok else EXIT_NUMERIC), files


def cmd_validate_trajectory(cfg) -> tuple[int, list]:
    rows = experiments.validate_noon_trajectory(cfg.system)
    text = formats._csv_text(("step", "expected", "realized", "max_error"),
                             [(i, name, gate, repr(err)) for i, name, gate, err in rows])
    files = [formats.write_text(Path(cfg.out) / "noon_trajectory.csv", text)]
    worst = max(r[3] for r in rows)
    for i, name, gate, err in rows:
        _report(f"{i:2d} {name:18s} {gate:34s} {err:.2e}")
    _report(f"max error {worst:.2e}")
    return (EXIT_OK if worst <= TRAJECTORY_TOLERANCE else EXIT_NUMERIC), files


COMMANDS = {"scan": cmd_scan, "synth": cmd_synth, "timing": cmd_timing,
            "validate-table1": cmd_validate_trajectory}
EXPERIMENT_OF = {"scan": "scan", "synth": "synth", "timing": "timing", "validate-table1": "synth"}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args, EXPERIMENT_OF[args.verb])
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    files, status = [], "ok"
    with experiments.Timer() as timer:
        try:
            code, files = COMMANDS[args.verb](cfg)
        except (CompilationError, PreconditionError) as exc:
            print(f"compilation failed: {exc}", file=sys.stderr)
            code = EXIT_COMPILE
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            code = EXIT_CONFIG
        except NumericalError as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            code = EXIT_NUMERIC
    if code != EXIT_OK:
        status = f"exit {code}"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        experiments.write_manifest(cfg.out, cfg, args.verb, timer.elapsed, files, status)
    return code


if __name__ == "__main__":
    sys.exit(main())
