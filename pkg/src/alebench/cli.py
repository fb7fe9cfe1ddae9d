"""Command-line entry point: one subcommand per experiment kind.

Examples
--------
Run the SNR comparison with defaults and write CSV under ./results::

    alebench mse_vs_snr --out results

Override config-file keys from the command line::

    alebench ber_awgn --config bench.cfg --set run.n_seeds=20 --seed 99

``run-all`` executes all five experiments into one output directory.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .bench import KINDS, emit_csv, parse_config, run_experiment
from .errors import ConfigError

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alebench",
        description="Deterministic noise-cancellation benchmarks (LMS vs PSO).",
    )
    parser.add_argument("--version", action="version", version=f"alebench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for kind in KINDS + ("run-all",):
        cmd = sub.add_parser(kind, help=f"run the {kind} experiment" if kind != "run-all" else "run all five experiments")
        cmd.add_argument("--config", type=Path, default=None, help="config file (flat key = value lines)")
        cmd.add_argument("--out", type=Path, default=Path("results"), help="output directory (default: results)")
        cmd.add_argument("--seed", type=int, default=None, help="override run.base_seed")
        cmd.add_argument("--seeds", type=int, default=None, help="override run.n_seeds")
        cmd.add_argument("--jobs", type=int, default=1, help="parallel worker processes (default: 1)")
        cmd.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            dest="overrides",
            help="override any config key; repeatable",
        )
    return parser


def _assemble(args) -> tuple[str, dict[str, str]]:
    text = ""
    if args.config is not None:
        text = Path(args.config).read_text(encoding="utf-8")
    overrides: dict[str, str] = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(item, "expected KEY=VALUE")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["run.base_seed"] = str(args.seed)
    if args.seeds is not None:
        overrides["run.n_seeds"] = str(args.seeds)
    return text, overrides


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    kinds = list(KINDS) if args.command == "run-all" else [args.command]
    try:
        text, overrides = _assemble(args)
        for kind in kinds:
            spec = parse_config(text, kind=kind, overrides=overrides)
            table = run_experiment(spec, jobs=args.jobs)
            paths = emit_csv(table, args.out)
            print(f"{kind}: wrote {', '.join(str(p) for p in paths)}")
    except (ConfigError, ValueError, OSError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
