"""arb-lab command line: run configs, materialize presets, emit plot data, validate.

Exit codes: 0 success, 2 configuration/validation error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import ConfigError, emit_plots, resolve_output_dir, run_experiment, validate_config
from .presets import DEFAULT_PATHS, DEFAULT_SEED, PRESET_NAMES, preset_dict

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _cmd_run(args) -> int:
    config = validate_config(_load_json(args.config))
    out = resolve_output_dir(config, args.out) or Path("runs") / config.name
    report = run_experiment(config, out)
    print(f"run complete: {config.name} -> {Path(out) / 'report.json'} "
          f"({report['wall_time_seconds']:.1f}s)")
    return EXIT_OK


def _cmd_preset(args) -> int:
    d = preset_dict(args.name, seed=args.seed, n_paths=args.paths)
    config = validate_config(d)
    if args.dump_config:
        print(json.dumps(d, sort_keys=True, indent=2))
        return EXIT_OK
    out = resolve_output_dir(config, args.out) or Path("runs") / config.name
    report = run_experiment(config, out)
    print(f"preset complete: {config.name} -> {Path(out) / 'report.json'} "
          f"({report['wall_time_seconds']:.1f}s)")
    return EXIT_OK


def _cmd_plots(args) -> int:
    report = _load_json(args.report)
    out = args.out or str(Path(args.report).parent)
    written = emit_plots(report, out)
    for p in written:
        print(p)
    return EXIT_OK


def _cmd_validate(args) -> int:
    validate_config(_load_json(args.config))
    print(f"{args.config}: valid")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arb-lab",
        description="Simulation laboratory for simple-arbitrage experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config (JSON)")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output directory (overrides config and env)")
    p_run.set_defaults(fn=_cmd_run)

    p_preset = sub.add_parser("preset", help="run a named preset scenario")
    p_preset.add_argument("name", help=f"one of: {', '.join(PRESET_NAMES)}")
    p_preset.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_preset.add_argument("--paths", type=int, default=DEFAULT_PATHS)
    p_preset.add_argument("--out", default=None)
    p_preset.add_argument("--dump-config", action="store_true",
                          help="print the materialized config instead of running")
    p_preset.set_defaults(fn=_cmd_preset)

    p_plots = sub.add_parser("plots", help="emit plot-ready CSV series from a report")
    p_plots.add_argument("report")
    p_plots.add_argument("--out", default=None)
    p_plots.set_defaults(fn=_cmd_plots)

    p_val = sub.add_parser("validate", help="validate a config against the shipped schema")
    p_val.add_argument("config")
    p_val.set_defaults(fn=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 3
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
