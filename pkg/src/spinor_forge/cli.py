"""Command-line entry point.

    spinor-forge selftest [--seed S]
    spinor-forge report --spacetime minkowski|schwarzschild|eds [--tetrad NAME] [--mass M]
    spinor-forge report --config FILE

Exit codes: 0 all pass, 1 any FAIL, 2 INCONCLUSIVE without FAIL, 64 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .config import ConfigError, load_custom_spacetime
from .constraints import Status
from .geometry import (
    TOL_ALG,
    TOL_GEO,
    GeometryError,
    comoving_tetrad,
    einstein_de_sitter,
    inertial_tetrad,
    minkowski,
    sample_points,
    schwarzschild,
    static_tetrad,
)
from .report import ReportDocument, build_report, selftest_document
from .selftest import run_selftest

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64

log = logging.getLogger("spinor_forge")

# spacetime -> (factory, {tetrad name: factory}, default tetrad)
BUILTINS = {
    "minkowski": (lambda m: minkowski(), {"inertial": lambda m: inertial_tetrad()}, "inertial"),
    "schwarzschild": (lambda m: schwarzschild(m), {"static": lambda m: static_tetrad(m)}, "static"),
    "eds": (lambda m: einstein_de_sitter(), {"comoving": lambda m: comoving_tetrad()}, "comoving"),
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    spacetime: str | None = None
    tetrad: str | None = None
    mass: float = 1.0
    points: int = 64
    seed: int = 0
    tol_alg: float = TOL_ALG
    tol_geo: float = TOL_GEO
    out: str | None = None
    format: str = "json"
    config: str | None = None

    def __post_init__(self):
        if self.points < 1:
            raise UsageError("--points must be >= 1")
        if not (self.tol_alg > 0 and self.tol_geo > 0):
            raise UsageError("tolerances must be positive")
        if not self.mass > 0:
            raise UsageError("--mass must be positive")

    def echo(self) -> dict:
        d = {"points": self.points, "seed": self.seed, "tol_alg": self.tol_alg, "tol_geo": self.tol_geo}
        if self.command == "report":
            if self.config is not None:
                d["config"] = Path(self.config).name
            else:
                d["spacetime"] = self.spacetime
                d["mass"] = self.mass if self.spacetime == "schwarzschild" else None
            d["tetrad"] = self.tetrad
        return d


def resolve(cfg: RunConfig):
    if cfg.config is not None:
        if cfg.spacetime is not None:
            raise UsageError("--config and --spacetime are mutually exclusive")
        s, t = load_custom_spacetime(cfg.config)
        if cfg.tetrad not in (None, t.name):
            raise UsageError(f"config file provides tetrad {t.name!r}, not {cfg.tetrad!r}")
        return s, t
    if cfg.spacetime is None:
        raise UsageError("report needs --spacetime or --config")
    if cfg.spacetime not in BUILTINS:
        raise UsageError(f"unknown spacetime {cfg.spacetime!r}; choose from {', '.join(BUILTINS)}")
    factory, tetrads, _ = BUILTINS[cfg.spacetime]
    name = cfg.tetrad or BUILTINS[cfg.spacetime][2]
    if name not in tetrads:
        raise UsageError(f"unknown tetrad {name!r} for {cfg.spacetime}; choose from {', '.join(tetrads)}")
    return factory(cfg.mass), tetrads[name](cfg.mass)


def cmd_algebra_selftest(cfg: RunConfig) -> ReportDocument:
    return selftest_document(run_selftest(cfg.seed), cfg.echo())


def cmd_report(cfg: RunConfig) -> ReportDocument:
    s, t = resolve(cfg)
    cfg = RunConfig(**{**cfg.__dict__, "tetrad": t.name})
    points = sample_points(s, cfg.points, cfg.seed)
    log.info("evaluating %s/%s at %d points", s.name, t.name, len(points))
    return build_report(s, t, points, cfg.echo(), cfg.tol_alg, cfg.tol_geo)


def exit_code(status: Status) -> int:
    return {Status.PASS: EXIT_OK, Status.FAIL: EXIT_FAIL, Status.INCONCLUSIVE: EXIT_INCONCLUSIVE}[status]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--points", type=int, default=64, help="sample point count (default 64)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-alg", type=float, default=TOL_ALG)
    common.add_argument("--tol-geo", type=float, default=TOL_GEO)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="spinor-forge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("selftest", parents=[common], help="algebra, isomorphism and ideal suites")
    r = sub.add_parser("report", parents=[common], help="geometry, spin connection and frame conditions")
    r.add_argument("--spacetime", help=", ".join(BUILTINS))
    r.add_argument("--tetrad")
    r.add_argument("--mass", type=float, default=1.0)
    r.add_argument("--config", help="custom spacetime file")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig(
            command=args.command,
            spacetime=getattr(args, "spacetime", None),
            tetrad=getattr(args, "tetrad", None),
            mass=getattr(args, "mass", 1.0),
            points=args.points,
            seed=args.seed,
            tol_alg=args.tol_alg,
            tol_geo=args.tol_geo,
            out=args.out,
            format=args.format,
            config=getattr(args, "config", None),
        )
        doc = cmd_algebra_selftest(cfg) if cfg.command == "selftest" else cmd_report(cfg)
    except (UsageError, ConfigError, GeometryError) as exc:
        print(f"spinor-forge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = doc.to_json() if cfg.format == "json" else doc.to_text()
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return exit_code(doc.verdict)


if __name__ == "__main__":
    sys.exit(main())
