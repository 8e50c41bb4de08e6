"""Command-line entry point.

    lambda-mixer <eigen|simulate|sweep|validate> [--config PATH] [--out PATH]
                 [--server URL] [--checks NAME ...]

Commands run in-process by default; with ``--server`` the CLI becomes a
thin client of a running HTTP service and writes the same artifacts
locally.  Exit codes: 0 success, 2 configuration error, 3 numerical
failure, 4 validation failure.  Failures emit a machine-readable JSON
record on stderr.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import commands
from .analysis import SweepRow
from .config import RunConfig, parse_config_file
from .errors import ConfigError, LambdaMixerError, NumericalError
from .tables import (
    SWEEP_COLUMNS,
    TRAJECTORY_COLUMNS,
    csv_text,
    sweep_table_rows,
    write_json,
    write_sweep_csv,
    write_trajectory_csv,
)
from .validate import CHECK_NAMES

_DEFAULT_OUT = {
    "eigen": "eigen.json",
    "simulate": "trajectory.csv",
    "sweep": "sweep.csv",
    "validate": "validation.json",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lambda-mixer",
        description="Four-wave mixing simulator for double-lambda media",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("eigen", "write the JSON spectrum at the configured field state"),
        ("simulate", "integrate one trajectory and write the CSV"),
        ("sweep", "run the seed-intensity sweep and write the CSV"),
        ("validate", "run the acceptance checks and write the JSON report"),
    ):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", help="flat key = value config file")
        cmd.add_argument("--out", help=f"output path (default {_DEFAULT_OUT[name]})")
        cmd.add_argument(
            "--server",
            help="base URL of a running service; run remotely instead of in-process",
        )
        if name == "validate":
            cmd.add_argument(
                "--checks",
                nargs="*",
                choices=CHECK_NAMES,
                help="subset of checks to run (default: all)",
            )
    return parser


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    return parse_config_file(path)


def _config_dict(cfg: RunConfig) -> dict:
    return {k: v for k, v in vars(cfg).items()}


def _nan(x):
    return math.nan if x is None else x


def _rows_from_payload(payload: dict) -> list[SweepRow]:
    return [
        SweepRow(
            epsilon=r["epsilon"],
            model=r["model"],
            phase_terms=r["phase_terms"],
            length_measured=_nan(r["L_measured"]),
            efficiency_measured=_nan(r["e_measured"]),
            length_analytic=_nan(r["L_analytic"]),
            efficiency_analytic=_nan(r["e_analytic"]),
            validity_flag=r["validity_flag"],
        )
        for r in payload["rows"]
    ]


def _run_remote(args, cfg: RunConfig, out: str) -> int:
    import httpx

    base = args.server.rstrip("/")
    body: dict = {"config": _config_dict(cfg)}
    if args.command == "validate" and getattr(args, "checks", None) is not None:
        body["checks"] = args.checks
    response = httpx.post(f"{base}/{args.command}", json=body, timeout=3600.0)
    if response.status_code != 200:
        raise NumericalError(
            f"server returned {response.status_code}: {response.text[:500]}"
        )
    payload = response.json()
    if args.command == "eigen":
        write_json(payload, out)
    elif args.command == "simulate":
        rows = [[_nan(v) for v in row] for row in payload["rows"]]
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text(TRAJECTORY_COLUMNS, rows))
    elif args.command == "sweep":
        write_sweep_csv(_rows_from_payload(payload), out)
    else:
        write_json(payload, out)
        if not payload["all_passed"]:
            return 4
    return 0


def _run_local(args, cfg: RunConfig, out: str) -> int:
    if args.command == "eigen":
        write_json(commands.run_eigen(cfg), out)
    elif args.command == "simulate":
        write_trajectory_csv(commands.run_simulate(cfg), out)
    elif args.command == "sweep":
        write_sweep_csv(commands.run_sweep(cfg), out)
    else:
        report = commands.run_validate(getattr(args, "checks", None))
        write_json(report, out)
        for check in report["checks"]:
            status = "PASS" if check["passed"] else "FAIL"
            print(f"{status}  {check['name']}: {check['detail']}")
        if not report["all_passed"]:
            return 4
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        out = args.out or (cfg.output_path or _DEFAULT_OUT[args.command])
        if args.server:
            return _run_remote(args, cfg, out)
        return _run_local(args, cfg, out)
    except ConfigError as exc:
        _emit_error(exc)
        return 2
    except NumericalError as exc:
        _emit_error(exc)
        return 3
    except LambdaMixerError as exc:
        _emit_error(exc)
        return 3
    except OSError as exc:
        _emit_error(exc)
        return 2


def _emit_error(exc: Exception) -> None:
    record = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(record), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
