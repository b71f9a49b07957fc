"""``dsgeom`` command line: one subcommand per verification run.

Every config key is also a flag (``--tau_end`` or ``--tau-end``); flags
override the ``--config`` file, which overrides the defaults.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import RunConfig, load_config
from .errors import ConfigError, GeometryError
from .report import dumps
from .verify import COMMANDS

_HELP = {
    "verify-christoffel": "Christoffel symbols, connection table and accelerations of the static chart",
    "verify-killing": "ambient Killing generators, Table 1 audit, Killing equations and charge conservation",
    "curvature": "sectional curvature, Ricci proportionality and Lambda",
    "lct": "Laplacian comparison: model Laplacians, Hessian identity, Bochner identity",
    "beltrami": "Beltrami projective coordinates: round trip, Jacobian and induced metric",
    "charts": "embedding constraints and quoted metrics for every named chart",
    "geodesic": "integrate one geodesic, write the CSV trajectory and check conservation",
}


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="INI-style config file")
    for f in dataclasses.fields(RunConfig):
        names = [f"--{f.name}"]
        if "_" in f.name:
            names.append(f"--{f.name.replace('_', '-')}")
        p.add_argument(*names, dest=f.name, metavar=f.name.upper(), default=None,
                       help=f"override {f.name} (default {getattr(RunConfig(), f.name)!r})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dsgeom", description="Numerical checks of de Sitter geometry.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        _add_config_flags(sub.add_parser(name, help=_HELP[name], description=_HELP[name]))
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {
        f.name: getattr(args, f.name)
        for f in dataclasses.fields(RunConfig)
        if getattr(args, f.name) is not None
    }
    return load_config(args.config, overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = COMMANDS[args.command](cfg)
    except (ConfigError, GeometryError) as exc:
        print(f"dsgeom {args.command}: {exc}", file=sys.stderr)
        return 2
    text = dumps(report.as_dict())
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
