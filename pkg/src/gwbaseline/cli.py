"""Command-line front end: gwbaseline {analytic,regimes,numeric,response,check}."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import config as cfgmod
from . import tables
from .core import DomainError, resonant_interrogation_time
from .trajectory import arm_paths, check_confinement, sample_trajectory

EXIT_VALIDATION = 2


def _common(p):
    p.add_argument("--config", metavar="PATH", help="TOML run configuration")
    p.add_argument("--output", metavar="PATH", help="output file, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--freq-min", type=float, metavar="HZ")
    p.add_argument("--freq-max", type=float, metavar="HZ")
    p.add_argument("--freq-points", type=int, metavar="N")
    p.add_argument("--log-grid", dest="log_grid", action="store_true", default=None,
                   help="log-spaced grid (default)")
    p.add_argument("--linear-grid", dest="log_grid", action="store_false")
    p.add_argument("--baseline-m", type=float, metavar="M")
    p.add_argument("--species", help="built-in species name, e.g. sr87")
    p.add_argument("--np-max", type=int)
    p.add_argument("--q-max", type=int)
    p.add_argument("--loss-per-pulse", type=float, metavar="LAMBDA")
    p.add_argument("--phase-uncertainty", type=float, metavar="RAD",
                   help="fixed phase uncertainty; replaces the shot-noise model")
    p.add_argument("--no-arm-separation", action="store_true")
    p.add_argument("--allow-odd-n", action="store_true")
    p.add_argument("--workers", type=int, metavar="N", help="worker processes (0 = all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gwbaseline",
                                     description="Resonant atom-interferometer baseline optimization")
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("analytic", help="continuous optimum per frequency"))
    _common(sub.add_parser("regimes", help="cutoff and bottom-loss boundaries per frequency"))
    _common(sub.add_parser("numeric", help="integer optimum with confinement, plus analytic gap"))

    p = sub.add_parser("response", help="off-resonance strain uncertainty of a stored optimum")
    _common(p)
    p.add_argument("--record", required=True, metavar="PATH", help="numeric table (CSV or JSON)")
    p.add_argument("--record-f", type=float, metavar="HZ", help="pick the row nearest this frequency")

    p = sub.add_parser("check", help="confinement report for an explicit scheme")
    _common(p)
    p.add_argument("--Q", type=int, required=True, dest="diamonds")
    p.add_argument("--N", type=int, required=True, dest="lmt")
    p.add_argument("--z0", type=float, required=True, metavar="M")
    p.add_argument("--v0", type=float, required=True, metavar="M/S")
    p.add_argument("--freq", type=float, required=True, metavar="HZ", help="resonant frequency")
    p.add_argument("--window-m", type=float, metavar="M", help="window height (default: baseline)")
    p.add_argument("--dump", metavar="PATH", help="write the sampled trajectory as CSV")
    p.add_argument("--step", type=float, default=1e-3, metavar="S", help="dump sampling step")
    return parser


def resolve_config(args) -> cfgmod.RunConfig:
    cfg = cfgmod.load(args.config) if args.config else cfgmod.RunConfig().validate()
    return cfgmod.with_overrides(
        cfg,
        baseline_m=args.baseline_m, species=args.species, np_max=args.np_max, q_max=args.q_max,
        enforce_arm_separation=False if args.no_arm_separation else None,
        enforce_even_N=False if args.allow_odd_n else None,
        **{"noise.loss_per_pulse": args.loss_per_pulse,
           "noise.phase_uncertainty": args.phase_uncertainty,
           "grid.freq_min_hz": args.freq_min, "grid.freq_max_hz": args.freq_max,
           "grid.points": args.freq_points, "grid.log": args.log_grid,
           "output.path": args.output, "output.format": args.format,
           "output.workers": args.workers},
    )


def _workers(cfg) -> int:
    return cfg.output.workers or os.cpu_count() or 1


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _check(cfg, args):
    if args.diamonds < 1 or args.lmt < 0:
        raise cfgmod.ConfigError("need Q >= 1 and N >= 0", field="Q" if args.diamonds < 1 else "N")
    if not args.freq > 0:
        raise cfgmod.ConfigError("resonant frequency must be positive", field="freq")
    window = cfg.baseline_m if args.window_m is None else args.window_m
    if not window > 0:
        raise cfgmod.ConfigError("window height must be positive", field="window_m")
    T = resonant_interrogation_time(args.freq)
    traj = arm_paths(args.diamonds, args.lmt, T, args.z0, args.v0, cfg.atom())
    rep = check_confinement(traj, window)
    if args.dump:
        rows = [{"t_s": float(t), "z_lower_m": float(lo), "z_upper_m": float(up)}
                for t, lo, up in sample_trajectory(traj, args.step)]
        _emit(tables.to_csv(rows, tables.TRAJECTORY_COLUMNS), args.dump)
    row = {"feasible": rep.feasible, "binding": rep.binding_constraint.value,
           "min_lower_arm_m": rep.min_lower_arm, "max_upper_arm_m": rep.max_upper_arm, "window_m": window}
    return [row], tables.CHECK_COLUMNS


def run(args) -> int:
    cfg = resolve_config(args)
    if args.command == "analytic":
        rows, cols = tables.analytic_table(cfg), tables.ANALYTIC_COLUMNS
    elif args.command == "regimes":
        rows, cols = tables.regime_table(cfg), tables.REGIME_COLUMNS
    elif args.command == "numeric":
        rows, cols = tables.numeric_table(cfg, _workers(cfg)), tables.NUMERIC_COLUMNS
    elif args.command == "response":
        rec = tables.pick_record(tables.load_records(args.record), args.record_f)
        explicit = any(v is not None for v in (args.freq_min, args.freq_max, args.freq_points))
        grid = tables.response_grid(rec, cfg, explicit)
        rows, cols = tables.response_table(cfg, rec, grid), tables.RESPONSE_COLUMNS
    else:
        rows, cols = _check(cfg, args)
    _emit(tables.render(rows, cols, cfg.output.format), cfg.output.path)
    return 0


def _fail(record) -> int:
    sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")
    return EXIT_VALIDATION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except cfgmod.ConfigError as exc:
        return _fail(exc.to_record())
    except tables.RecordMismatchError as exc:
        return _fail({"error": "record_mismatch", "field": None, "line": None, "message": str(exc)})
    except DomainError as exc:
        return _fail({"error": "validation", "field": None, "line": None, "message": str(exc)})
    except OSError as exc:
        return _fail({"error": "io", "field": None, "line": None,
                      "message": f"{exc.strerror or exc}: {exc.filename}"})


if __name__ == "__main__":
    sys.exit(main())
