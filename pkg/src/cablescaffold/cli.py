"""Command-line front end: simulate, analyze, plot, validate, scenarios."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .kinematics import KinematicsError
from .report import EmptyTelemetryError, compute_rms
from .rig import ScenarioError, ScenarioFileError, load_scenario
from .scenarios import emit_paper_scenarios
from .sim import SimulationError, run
from .sim._backend import KERNELS
from .telemetry import COLUMNS, CSV_FORMAT, Telemetry, TelemetryFormatError
from .validation import run_quick_suite

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

ERROR_CHANNELS = {
    "err_px": ("px", "px_ref"),
    "err_py": ("py", "py_ref"),
    "err_th": ("th", "th_ref"),
    **{f"err_L{i}": (f"L{i}", f"L{i}_ref") for i in range(1, 5)},
}


class UsageError(Exception):
    pass


def _error(message: str) -> None:
    print(f"cablescaffold: error: {message}", file=sys.stderr)


def _output_path(scenario_path: Path, scenario, args) -> Path:
    if args.out is not None:
        return Path(args.out)
    name = Path(scenario.output_path).name if scenario.output_path else scenario_path.with_suffix(".csv").name
    if args.out_dir is not None:
        return Path(args.out_dir) / name
    if scenario.output_path:
        return Path(scenario.output_path)
    return Path(name)


def _simulate_one(path: Path, args) -> tuple[int, str]:
    try:
        scenario = load_scenario(path)
    except ScenarioFileError as err:
        return EXIT_USAGE, str(err)
    except ScenarioError as err:
        return EXIT_FAILURE, str(err)
    if args.gains == "experimental":
        if scenario.experimental_kp is None or scenario.experimental_ki is None:
            return EXIT_USAGE, f"{path}: scenario has no experimental gains [key: experimental_gains]"
        scenario = scenario.with_gains(scenario.experimental_kp, scenario.experimental_ki)
    out = _output_path(path, scenario, args)
    try:
        telemetry = run(scenario, backend=args.backend)
    except SimulationError as err:
        if err.records is not None and len(err.records):
            diag = out.with_name(out.stem + ".failure.csv")
            try:
                err.records.to_csv(diag)
                return EXIT_FAILURE, f"{path}: {err} (last records in {diag})"
            except OSError:
                pass
        return EXIT_FAILURE, f"{path}: {err}"
    except KinematicsError as err:
        return EXIT_FAILURE, f"{path}: {err}"
    try:
        if out.parent != Path(""):
            out.parent.mkdir(parents=True, exist_ok=True)
        telemetry.to_csv(out)
    except OSError as err:
        return EXIT_USAGE, f"{out}: cannot write telemetry: {err.strerror}"
    final = telemetry.record(len(telemetry) - 1)
    return EXIT_OK, (
        f"{path}: {len(telemetry)} records -> {out} "
        f"(final pose {final.pose[0]:.5f} m, {final.pose[1]:.5f} m, {final.pose[2]:.5f} rad)"
    )


def cmd_simulate(args) -> int:
    paths = [Path(p) for p in args.scenarios]
    if args.out is not None and len(paths) > 1:
        raise UsageError("--out takes a single scenario; use --out-dir for several")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(lambda p: _simulate_one(p, args), paths))
    code = EXIT_OK
    for status, message in results:
        if status == EXIT_OK:
            print(message)
        else:
            _error(message)
        code = max(code, status)
    return code


def _load_log(path) -> Telemetry:
    try:
        return Telemetry.from_csv(path)
    except OSError as err:
        raise UsageError(f"{path}: cannot read log: {err.strerror}") from err
    except TelemetryFormatError as err:
        raise UsageError(str(err)) from err


def cmd_analyze(args) -> int:
    telemetry = _load_log(args.log)
    try:
        report = compute_rms(telemetry)
    except EmptyTelemetryError as err:
        _error(f"{args.log}: {err}")
        return EXIT_FAILURE
    print(report.to_json() if args.json else report.format_table())
    return EXIT_OK


def cmd_plot(args) -> int:
    if args.channel not in COLUMNS and args.channel not in ERROR_CHANNELS:
        raise UsageError(f"unknown channel '{args.channel}' [key: channel]")
    telemetry = _load_log(args.log)
    if args.channel in ERROR_CHANNELS:
        actual, ref = ERROR_CHANNELS[args.channel]
        values = telemetry[actual] - telemetry[ref]
    else:
        values = telemetry[args.channel]
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(f"t,{args.channel}\n")
            np.savetxt(fh, np.column_stack((telemetry["t"], values)), fmt=CSV_FORMAT, delimiter=",")
    except OSError as err:
        raise UsageError(f"{args.out}: cannot write plot data: {err.strerror}") from err
    print(f"{len(telemetry)} rows -> {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_quick_suite(seed=args.seed)
    for result in results:
        if result.name == "mobility":
            print(result.detail)
    for result in results:
        print(f"{'PASS' if result.passed else 'FAIL'}  {result.name}: {result.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILURE


def cmd_emit_paper(args) -> int:
    try:
        paths = emit_paper_scenarios(args.dir)
    except OSError as err:
        raise UsageError(f"{args.dir}: cannot write scenarios: {err.strerror}") from err
    for path in paths:
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cablescaffold", description="Planar four-cable robot simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run scenarios and write telemetry CSV")
    p.add_argument("scenarios", nargs="+", help="scenario JSON files")
    p.add_argument("--out", help="telemetry CSV path (single scenario)")
    p.add_argument("--out-dir", help="directory for telemetry CSVs")
    p.add_argument("--gains", choices=("simulation", "experimental"), default="simulation")
    p.add_argument("--backend", choices=sorted(KERNELS), default=None, help="integration kernel")
    p.add_argument("--jobs", type=int, default=1, help="scenarios run concurrently")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="print RMS tracking errors of a telemetry log")
    p.add_argument("log")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("plot", help="write two-column (t, value) plot data")
    p.add_argument("log")
    p.add_argument("--channel", required=True, help="telemetry column or err_<column>")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("validate", help="mobility check and invariant quick-suite")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("scenarios", help="bundled scenario files")
    scen = p.add_subparsers(dest="scenarios_command", required=True)
    q = scen.add_parser("emit-paper", help="write the three bundled scenarios as JSON")
    q.add_argument("--dir", default=".")
    q.set_defaults(func=cmd_emit_paper)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as err:
        _error(str(err))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
