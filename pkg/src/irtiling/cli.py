"""Command-line entry point: ``irtiling generate | verify | infer-rule | calibrate``.

Exit codes: 0 success, 1 a verification check failed, 2 usage or parameter
error, 3 internal inconsistency (for example a conflicting substitution block).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import naked, render, verify
from .calibration import BlockAnchor, calibrate_base
from .decoration import default_calibration_text, load_base
from .errors import InconsistentBlock, TilingError
from .geometry import LEVEL_CAP
from .substitution import Position, infer_rule
from .view import Rect, level_grid, limit_grid

CONFIG_ENV = "IRTILING_CONFIG"
MAX_RADIUS = 4096

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    mode: str = "arrowed"
    level: int | None = None
    radius: int | None = None
    fmt: str = "json"
    palette: str | None = None
    unit: int = render.UNIT
    calibration: str | None = None
    no_calibration: bool = False
    jobs: int = 1
    seed: int = 0
    suites: tuple = ()
    bound: int = 32
    samples: int = 100
    window: int = 32
    output: str | None = None
    report: str | None = None
    strict: bool = False
    anchor: str = "UR"

    def validate(self):
        if self.level is not None and not 0 <= self.level <= LEVEL_CAP:
            raise UsageError(f"--level must be in 0..{LEVEL_CAP}")
        if self.radius is not None and not 1 <= self.radius <= MAX_RADIUS:
            raise UsageError(f"--radius must be in 1..{MAX_RADIUS}")
        if self.jobs < 1:
            raise UsageError("--jobs must be positive")
        if self.unit < 1:
            raise UsageError("--unit must be positive")
        if self.command == "infer-rule" and not 8 <= self.window <= 1024:
            raise UsageError("--window must be in 8..1024")
        if self.command == "verify":
            if self.bound < 1 or self.samples < 1:
                raise UsageError("--bound and --samples must be positive")
            unknown = [s for s in self.suites if s not in verify.SUITES]
            if unknown:
                raise UsageError(f"unknown suite(s) {unknown}; choose from {sorted(verify.SUITES)} or all")
        path = self.calibration_path()
        if self.no_calibration and path is not None and not Path(path).is_file():
            raise UsageError(f"--no-calibration given but calibration file {path} does not exist")

    def calibration_path(self):
        return self.calibration or os.environ.get(CONFIG_ENV)

    def base_and_report(self):
        """Colouring to use plus its key=value text.

        A configured but missing file triggers calibration unless that is disabled.
        """
        path = self.calibration_path()
        if path is None:
            base = load_base()
            return base, default_calibration_text()
        if Path(path).is_file():
            return load_base(path), Path(path).read_text()
        if self.no_calibration:
            raise UsageError(f"calibration file {path} does not exist")
        report = calibrate_base()
        return report.chosen, report.to_text()

    def base(self):
        return self.base_and_report()[0]


def _write(text, output):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def cmd_generate(cfg: RunConfig):
    base = cfg.base()
    if cfg.level is not None and cfg.radius is not None:
        raise UsageError("give either --level or --radius, not both")
    if cfg.level is None and cfg.radius is None:
        raise UsageError("generate needs --level or --radius")
    if cfg.level is not None:
        n = cfg.level
        window = Rect.centred(1 << n)
        grid = level_grid(n, window, base)
        anchor = {"source": "level", "level": n, "radius": None}
    else:
        window = Rect.centred(cfg.radius)
        grid = limit_grid(window, base)
        anchor = {"source": "limit", "level": None, "radius": cfg.radius}
    if cfg.mode == "arrowed":
        patch = grid.to_patch()
        if cfg.fmt == "svg":
            text = render.arrowed_svg(patch, render.parse_palette(cfg.palette), cfg.unit)
        elif cfg.fmt == "json":
            text = render.arrowed_json(patch, anchor)
        else:
            text = render.arrowed_text(patch)
    else:
        tiles = naked.visible_decomposition(cfg.level, window if cfg.level is None else None)
        if cfg.fmt == "svg":
            text = render.naked_svg(tiles, grid.bounds, cfg.unit)
        elif cfg.fmt == "json":
            text = render.naked_json(tiles, anchor)
        else:
            text = render.naked_text(tiles)
    _write(text, cfg.output)
    return EXIT_OK


def _run_one(args):
    name, scale = args
    return verify.SUITES[name](scale)


def cmd_verify(cfg: RunConfig):
    scale = verify.Scale(
        level=cfg.level if cfg.level is not None else 8,
        radius=cfg.radius if cfg.radius is not None else 128,
        bound=cfg.bound,
        samples=cfg.samples,
        seed=cfg.seed,
        base=cfg.base(),
    )
    names = list(cfg.suites)
    if cfg.jobs > 1 and len(names) > 1:
        with ProcessPoolExecutor(cfg.jobs) as pool:
            parts = list(pool.map(_run_one, [(n, scale) for n in names]))
    else:
        parts = [_run_one((n, scale)) for n in names]
    checks = [c for part in parts for c in part]
    passed = all(c.passed for c in checks)
    if cfg.fmt == "json":
        text = json.dumps(
            {"status": "PASS" if passed else "FAIL", "checks": [c.to_dict() for c in checks]}, indent=1
        ) + "\n"
    else:
        text = "\n".join(c.line() for c in checks)
        text += f"\n{'PASS' if passed else 'FAIL'}: {sum(c.passed for c in checks)}/{len(checks)} checks\n"
    _write(text, cfg.output)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_infer_rule(cfg: RunConfig):
    base, report_text = cfg.base_and_report()
    rule = infer_rule(cfg.window, base=base)
    _write(rule.to_text(), cfg.output)
    if cfg.report:
        Path(cfg.report).write_text(report_text)
    else:
        sys.stderr.write(report_text)
    return EXIT_OK


def cmd_calibrate(cfg: RunConfig):
    report = calibrate_base(BlockAnchor(Position[cfg.anchor]), strict=cfg.strict)
    _write(report.to_text(), cfg.output)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="irtiling", description="Inductive rotation tilings.")
    parser.add_argument("--calibration", help=f"colouring file (default: ${CONFIG_ENV}, else the packaged one)")
    parser.add_argument("--no-calibration", action="store_true", help="never auto-calibrate; require the file")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for verification")
    parser.add_argument("--seed", type=int, default=0, help="seed for sampled scans")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write an arrowed or naked window")
    g.add_argument("--mode", choices=("arrowed", "naked"), default="arrowed")
    g.add_argument("--level", type=int, help="top view of the level-n patch")
    g.add_argument("--radius", type=int, help="limit tiling over [-r, r)^2")
    g.add_argument("--format", dest="fmt", choices=("svg", "json", "text"), default="json")
    g.add_argument("--palette", help="T1=#rrggbb,T2=... (svg only)")
    g.add_argument("--unit", type=int, default=render.UNIT, help="pixels per unit (svg only)")
    g.add_argument("--output", "-o", help="output file (default stdout)")

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", action="append", default=None, help="suite name or 'all' (repeatable)")
    v.add_argument("--level", type=int, default=8)
    v.add_argument("--radius", type=int, default=128)
    v.add_argument("--bound", type=int, default=32)
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    v.add_argument("--output", "-o")

    r = sub.add_parser("infer-rule", help="infer the substitution rule")
    r.add_argument("--window", type=int, default=32, help="inference radius")
    r.add_argument("--output", "-o", help="rule file (default stdout)")
    r.add_argument("--report", help="calibration report file (default stderr)")

    c = sub.add_parser("calibrate", help="search the 24 quadrant colourings")
    c.add_argument("--anchor", choices=[p.name for p in Position], default="UR")
    c.add_argument("--strict", action="store_true", help="fail if several colourings survive")
    c.add_argument("--output", "-o")
    return parser


def config_from_args(ns) -> RunConfig:
    cfg = RunConfig(command=ns.command, calibration=ns.calibration, no_calibration=ns.no_calibration, jobs=ns.jobs, seed=ns.seed)
    for name in ("mode", "level", "radius", "fmt", "palette", "unit", "bound", "samples", "window", "output", "report", "strict"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    if ns.command == "verify":
        chosen = ns.suite or ["all"]
        cfg.suites = tuple(verify.SUITES) if "all" in chosen else tuple(dict.fromkeys(chosen))
    if ns.command == "calibrate":
        cfg.anchor = ns.anchor
    return cfg


COMMANDS = {
    "generate": cmd_generate,
    "verify": cmd_verify,
    "infer-rule": cmd_infer_rule,
    "calibrate": cmd_calibrate,
}


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        cfg.validate()
        if cfg.palette:
            render.parse_palette(cfg.palette)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, ValueError) as exc:
        print(f"irtiling: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InconsistentBlock as exc:
        print(f"irtiling: inconsistent block at cell {exc.cell} ({exc.colour.value}): {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except TilingError as exc:
        print(f"irtiling: internal inconsistency: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except OSError as exc:
        print(f"irtiling: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
