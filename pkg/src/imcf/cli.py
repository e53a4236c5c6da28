"""Command line entry point: ``imcf run | verify | oracle | energy-check``.

Exit codes: 0 success, 1 check failure, 2 usage or configuration error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io
from .analysis import run_checks
from .config import load_config
from .errors import ConfigError, NumericalFailure
from .flow import run_flow
from .oracles import ORACLE_TABLES, TABLE_COLUMNS, homogeneous_table
from .spacetime import energy_condition_margin, future_volume_decay

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _out_dir(args, config) -> Path:
    if args.out:
        return Path(args.out)
    return Path(config.output_dir or Path("out") / config.name)


def cmd_run(args) -> int:
    config = load_config(args.config)
    out = _out_dir(args, config)
    traj = run_flow(config)
    io.write_trajectory(traj, out, config.hash())
    summary = {
        "config_sha256": config.hash(),
        "scenario": config.name,
        "termination": traj.termination,
        "records": len(traj),
        "snapshots": len(traj.snapshots),
        "final": traj.last_record(),
    }
    (out / "run.json").write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n")
    if not args.quiet:
        print(f"{config.name}: {len(traj)} records, terminated by {traj.termination}; wrote {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    config = load_config(args.config)
    out = _out_dir(args, config)
    traj_path = Path(args.trajectory) if args.trajectory else out / "trajectory.csv"
    if not traj_path.is_file():
        raise ConfigError(f"trajectory file not found: {traj_path}")
    traj = io.read_trajectory(traj_path)
    if traj.meta.get("config_hash") not in (None, config.hash()):
        _warn("trajectory was produced by a different config")
    if not config.checks.enabled:
        _warn("no checks enabled; report is empty")
    reports = run_checks(traj, config, args.tol_scale)
    report_path = Path(args.report) if args.report else traj_path.parent / "report.json"
    io.write_report(reports, report_path, config.hash())
    if not args.quiet:
        for name in sorted(reports):
            print(reports[name].summary_line())
    return EXIT_OK if all(r.passed for r in reports.values()) else EXIT_FAIL


def cmd_oracle(args) -> int:
    if args.scenario not in ORACLE_TABLES:
        raise ConfigError(f"unknown oracle table {args.scenario!r}; available: {sorted(ORACLE_TABLES)}")
    n, u0 = ORACLE_TABLES[args.scenario]
    table = homogeneous_table(n, u0)
    lines = [f"# oracle={args.scenario} n={n} u0={u0!r}", ",".join(TABLE_COLUMNS)]
    for row in zip(*(table[c] for c in TABLE_COLUMNS)):
        lines.append(",".join(repr(float(x)) for x in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        path = Path(args.out)
        path.mkdir(parents=True, exist_ok=True)
        (path / f"oracle_{args.scenario}.csv").write_text(text)
    if not args.quiet:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_energy_check(args) -> int:
    config = load_config(args.config)
    lam = config.checks.lam if args.lam is None else args.lam
    report = energy_condition_margin(config.spacetime, lam, config.checks.energy)
    if not args.quiet:
        print(f"lambda = {lam!r}, samples = {report.samples}, rapidity cap = {report.rapidity_cap!r}")
        print(f"min margin = {report.min_margin!r}")
        print(f"witness: x0 = {report.witness.x0!r}, nu = {report.witness.components.tolist()}")
        decay = future_volume_decay(config.spacetime)
        print(f"future volume decay: {'yes' if decay.decays else 'no'} (slice volume {decay.volumes[-1]:.3e} at x0 = {float(decay.x0[-1])!r})")
    return EXIT_OK if report.holds else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="imcf", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--quiet", action="store_true")
    common.add_argument("--out", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", parents=[common], help="integrate a scenario")
    p.add_argument("--config", required=True, help="config JSON path or bundled scenario name")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", parents=[common], help="check a trajectory")
    p.add_argument("--config", required=True)
    p.add_argument("--trajectory", help="trajectory CSV (default: <out>/trajectory.csv)")
    p.add_argument("--report", help="report JSON path (default: next to the trajectory)")
    p.add_argument("--tol-scale", type=float, default=1.0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", parents=[common], help="closed-form homogeneous tables")
    p.add_argument("scenario", help=f"one of {sorted(ORACLE_TABLES)}")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("energy-check", parents=[common], help="sample the energy condition")
    p.add_argument("--config", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.set_defaults(func=cmd_energy_check)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}; last record: {exc.last_record}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
