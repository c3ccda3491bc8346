"""Command line entry point: translab <command> --config <path> [--out DIR] [--seed N] [--threads K]."""

import argparse
import json
import os
import sys

from .config import COMMANDS, load_config
from .errors import ConfigError, TranslabError
from .runner import DEFAULT_OUT, run_experiment

EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_CHECKS_FAILED = 4
EXIT_UNEXPECTED = 1


def build_parser():
    p = argparse.ArgumentParser(prog="translab", description="Transmission-problem potential experiments.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="YAML experiment configuration")
    p.add_argument("--out", default=None, help=f"output directory (default $TRANSLAB_OUT or {DEFAULT_OUT})")
    p.add_argument("--seed", type=int, default=None, help="override the configured seed")
    p.add_argument("--threads", type=int, default=1, help="worker threads for independent jobs")
    return p


def _write_error(out_dir, command, kind, exc):
    os.makedirs(out_dir, exist_ok=True)
    record = {"command": command, "error": kind, "type": type(exc).__name__, "message": str(exc)}
    with open(os.path.join(out_dir, "error.json"), "w") as fh:
        fh.write(json.dumps(record, indent=2, sort_keys=True) + "\n")
    print(f"translab: {kind}: {exc}", file=sys.stderr)


def main(argv=None):
    args = build_parser().parse_args(argv)
    out_dir = args.out or os.environ.get("TRANSLAB_OUT", DEFAULT_OUT)
    try:
        cfg = load_config(args.config, args.command)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed must be non-negative")
            cfg.seed = args.seed
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
    except ConfigError as exc:
        _write_error(out_dir, args.command, "config", exc)
        return EXIT_CONFIG
    try:
        report = run_experiment(cfg, out_dir, args.threads)
    except TranslabError as exc:
        _write_error(out_dir, args.command, "precondition", exc)
        return EXIT_PRECONDITION
    except Exception as exc:  # noqa: BLE001 - every failure must leave a machine-readable record
        _write_error(out_dir, args.command, "unexpected", exc)
        return EXIT_UNEXPECTED
    if report.summary:
        print(report.summary)
    for name, (_, rows) in report.tables.items():
        print(f"{name}.csv: {len(rows)} rows")
    if not report.passed:
        _write_error(out_dir, args.command, "checks-failed", RuntimeError("one or more checks failed"))
        return EXIT_CHECKS_FAILED
    return 0


if __name__ == "__main__":
    sys.exit(main())
