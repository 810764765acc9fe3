"""Command-line entry point: run, list, and validate experiments.

`sgkink run` accepts one or more JSON configs; multiple configs run as a
sweep with process parallelism capped by the SGKINK_THREADS environment
variable (default: sequential).  Exit status is 0 iff every experiment met
its tolerances.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .experiments import (
    EXPERIMENT_NAMES,
    ExperimentConfig,
    run_experiment,
    write_report,
)

__all__ = ["main"]


def _thread_cap() -> int:
    raw = os.environ.get("SGKINK_THREADS", "1")
    try:
        val = int(raw)
    except ValueError as exc:
        raise SystemExit(f"SGKINK_THREADS must be an integer, got {raw!r}") from exc
    return max(1, val)


def _run_one(args: tuple) -> tuple:
    path, out_dir = args
    cfg = ExperimentConfig.from_json(path)
    rep = run_experiment(cfg)
    write_report(rep, out_dir)
    return path, rep.passed, rep.failures


def _cmd_run(args) -> int:
    jobs = []
    for path in args.configs:
        stem = Path(path).stem
        out_dir = (
            Path(args.out)
            if len(args.configs) == 1
            else Path(args.out) / stem
        )
        jobs.append((path, out_dir))
    workers = min(_thread_cap(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(job) for job in jobs]
    ok = True
    for path, passed, failures in results:
        status = "ok" if passed else "FAILED"
        print(f"{path}: {status}")
        for msg in failures:
            print(f"  tolerance violated: {msg}")
        ok = ok and passed
    return 0 if ok else 1


def _cmd_list(_args) -> int:
    for name in EXPERIMENT_NAMES:
        print(name)
    return 0


def _cmd_validate(args) -> int:
    try:
        cfg = ExperimentConfig.from_json(args.config)
    except (OSError, TypeError, ValueError, json.JSONDecodeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 1
    print(f"valid config for experiment {cfg.name!r}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sgkink",
        description="Numerical experiments on sine-Gordon kink dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run experiments from JSON configs")
    p_run.add_argument("configs", nargs="+", help="experiment config files")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_list = sub.add_parser("list", help="list available experiments")
    p_list.set_defaults(func=_cmd_list)

    p_val = sub.add_parser("validate", help="check a config without running")
    p_val.add_argument("config", help="experiment config file")
    p_val.set_defaults(func=_cmd_validate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
