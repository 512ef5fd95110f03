"""Command line entry point: ``perspline {gram,decay,project,quasi,verify-all}``."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .errors import SplineError
from .harness import COMMANDS, ConfigError, SweepConfig, _ints, _names, cmd_verify_all, parse_config_text, render

OUT_DIR_ENV = "PERSPLINE_OUT_DIR"

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit code 2 with usage, as argparse does
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="perspline", description="Periodic spline projection and quasiinterpolation experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (("gram", "Gram stencils and spectral bounds"),
                            ("decay", "decay of the inverse Gram matrix"),
                            ("project", "L2 projection stability and convergence"),
                            ("quasi", "quasiinterpolant stability and convergence"),
                            ("verify-all", "run every acceptance criterion")):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", type=Path, help="key = value file; flags override it")
        sp.add_argument("--r", help="comma-separated spline orders")
        sp.add_argument("--N", help="comma-separated mesh sizes")
        sp.add_argument("--l", help="comma-separated derivative orders")
        sp.add_argument("--corpus", help="comma-separated test function ids")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--nodes-per-cell", type=int)
        sp.add_argument("--samples-per-cell", type=int)
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--out", help="output file (default: stdout, or $%s/<command>.<format>)" % OUT_DIR_ENV)
    return p


def resolve_config(args: argparse.Namespace) -> SweepConfig:
    cfg = SweepConfig()
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        cfg = parse_config_text(text, cfg)
    updates = {}
    for flag, attr, conv in (("r", "r_list", _ints), ("N", "N_list", _ints), ("l", "l_list", _ints),
                             ("corpus", "corpus", _names)):
        raw = getattr(args, flag)
        if raw is not None:
            updates[attr] = conv(raw)
    for attr in ("seed", "nodes_per_cell", "samples_per_cell", "format", "out"):
        if getattr(args, attr) is not None:
            updates[attr] = getattr(args, attr)
    return replace(cfg, **updates).validate()


def _destination(cfg: SweepConfig, command: str) -> Path | None:
    if cfg.out is not None:
        return Path(cfg.out)
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return Path(env) / f"{command}.{cfg.format}"
    return None


def _emit(text: str, dest: Path | None) -> None:
    if dest is None:
        sys.stdout.write(text)
        return
    dest.parent.mkdir(parents=True, exist_ok=True)
    dest.write_text(text)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "verify-all":
            report, results = cmd_verify_all(cfg, stream=sys.stdout)
            dest = _destination(cfg, "verify-all")
            if dest is not None:
                _emit(render(report, cfg.format), dest)
            return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED
        report = COMMANDS[args.command](cfg)
    except (ConfigError, SplineError) as exc:
        print(f"perspline: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(render(report, cfg.format), _destination(cfg, args.command))
    return EXIT_FAILED if report.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
