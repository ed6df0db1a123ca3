"""Command-line front end: ``hillspec <subcommand> [options]``.

Exit codes: 0 on success, 1 on input errors, 2 on numerical failures. Logs go
to standard error; standard output carries only the requested result.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .config import DEFAULTS, get_env, setting
from .diagnostics import DiagnosticsConfig
from .errors import InputError, NumericalFailure, UsageError
from .expansion import ExpansionConfig, TestFunction, bump, gaussian_window, load_test_function
from .floquet import FloquetConfig
from .potential import FourierPotential, load_potential
from .services.pipeline import PipelineResult, SpectralPipeline, curves_from_document
from .services.reports import load_document, save_document, save_text
from .services.selftest import run_selftest
from .spectrum import TrackingConfig

logger = logging.getLogger(__name__)

COMMANDS = ("discriminant", "bands", "singularities", "check", "expand", "selftest")
# Subcommands whose default standard-output form is the one-line summary.
SUMMARY_COMMANDS = {"discriminant", "check"}


class RunConfig(BaseModel):
    """Validated options of one command-line run."""

    model_config = ConfigDict(extra="forbid")

    command: Literal["discriminant", "bands", "singularities", "check", "expand", "selftest"]
    potential: Optional[Path] = None
    out: Optional[Path] = None
    format: Literal["json", "csv"] = "json"
    nmax: int = Field(default=int(DEFAULTS["nmax"]), ge=1)
    tgrid: int = Field(default=int(DEFAULTS["tgrid"]), ge=16)
    tol: float = Field(default_factory=lambda: setting("tol"), gt=0)
    eps_sing: float = Field(default_factory=lambda: setting("eps_sing"), gt=0)
    Q: int = Field(default_factory=lambda: int(setting("Q")), ge=100)
    xgrid: int = Field(default=int(DEFAULTS["xgrid"]), ge=8)
    cross_tol: float = Field(default_factory=lambda: setting("cross_tol"), gt=0)
    workers: Optional[int] = Field(default=None, ge=1)

    def tracking(self) -> TrackingConfig:
        return TrackingConfig(nmax=self.nmax, tgrid=self.tgrid, tol=self.tol, workers=self.workers)

    def diagnostics(self) -> DiagnosticsConfig:
        return DiagnosticsConfig(floquet=FloquetConfig(tracking=self.tracking(), xgrid=self.xgrid), Q=self.Q)

    def expansion(self, interval: Tuple[int, int]) -> ExpansionConfig:
        return ExpansionConfig.create(
            nmax=self.nmax,
            tgrid=self.tgrid,
            eps_sing=self.eps_sing,
            interval=interval,
            xgrid=self.xgrid,
            cross_tol=self.cross_tol,
            workers=self.workers,
            tracking=self.tracking(),
        )


class HillArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises ``UsageError`` instead of exiting."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nmax", type=int, help=f"Bands |n| <= nmax (default {DEFAULTS['nmax']}).")
    common.add_argument("--tgrid", type=int, help=f"Quasimomentum grid size (default {DEFAULTS['tgrid']}).")
    common.add_argument("--tol", type=float, help=f"ODE tolerance (default {DEFAULTS['tol']}).")
    common.add_argument("--xgrid", type=int, help=f"Intervals of the x-grid on [0, 1] (default {DEFAULTS['xgrid']}).")
    common.add_argument("--Q", type=int, help=f"Search bound of the angle test (default {DEFAULTS['Q']}).")
    common.add_argument("--workers", type=int, help="Worker-pool size (default: HILLSPEC_WORKERS or CPU count).")
    common.add_argument("--out", type=Path, help="Output file (default: standard output).")
    common.add_argument("--format", choices=("json", "csv"), help="Output format (default json).")
    common.add_argument("--log-level", help="Logging level (default: HILLSPEC_LOG_LEVEL or WARNING).")
    return common


def build_parser() -> HillArgumentParser:
    common = _common_options()
    parser = HillArgumentParser(prog="hillspec", description="Spectral analysis of Hill operators.")
    commands = parser.add_subparsers(dest="command", required=True, metavar="{" + ",".join(COMMANDS) + "}")

    discriminant = commands.add_parser("discriminant", parents=[common], help="F, F' and spectrum membership at lambda.")
    discriminant.add_argument("--potential", type=Path, required=True)
    discriminant.add_argument("--lambda", dest="lam", type=float, nargs="+", required=True, metavar="RE [IM]")

    bands = commands.add_parser("bands", parents=[common], help="Band curves Gamma_n on [0, pi].")
    bands.add_argument("--potential", type=Path, required=True)

    singularities = commands.add_parser(
        "singularities", parents=[common], help="Spectral singularities and the spectrality diagnostic."
    )
    singularities.add_argument("--potential", type=Path, required=True)
    singularities.add_argument("--bands", type=Path, help="Reuse a saved band document.")

    check = commands.add_parser("check", parents=[common], help="Coefficient criteria for spectrality.")
    which = check.add_mutually_exclusive_group(required=True)
    which.add_argument("--mathieu", type=float, nargs=4, metavar=("ARE", "AIM", "BRE", "BIM"))
    which.add_argument("--alpha", type=float)
    which.add_argument("--potential", type=Path)
    check.add_argument("--condition1", type=float, nargs=3, metavar=("S", "C", "EPS"))
    check.add_argument("--nrange", type=int, nargs=2, metavar=("LO", "HI"), default=(1, 20))

    expand = commands.add_parser("expand", parents=[common], help="Reconstruct f from its spectral expansion.")
    expand.add_argument("--potential", type=Path, required=True)
    source = expand.add_mutually_exclusive_group(required=True)
    source.add_argument("--function", type=Path, help="Test-function JSON document.")
    source.add_argument("--bump", type=float, nargs=2, metavar=("CENTER", "RADIUS"))
    source.add_argument("--gaussian", type=float, nargs=3, metavar=("CENTER", "SIGMA", "HALF_WIDTH"))
    expand.add_argument("--interval", type=int, nargs=2, metavar=("A", "B"), default=(-2, 2))
    expand.add_argument("--eps-sing", dest="eps_sing", type=float)
    expand.add_argument("--cross-tol", dest="cross_tol", type=float)

    commands.add_parser("selftest", parents=[common], help="Run the invariant suite.")
    return parser


def configure_logging(level: Optional[str]) -> None:
    name = (level or get_env("HILLSPEC_LOG_LEVEL", "WARNING") or "WARNING").upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        raise UsageError(f"Unknown log level {name!r}.")
    logging.basicConfig(level=numeric, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("hillspec").setLevel(numeric)


def run_config(args: argparse.Namespace) -> RunConfig:
    fields = set(RunConfig.model_fields)
    values: Dict[str, Any] = {k: v for k, v in vars(args).items() if k in fields and v is not None}
    if args.command == "check" and "potential" in values and args.condition1 is None:
        raise UsageError("check --potential needs --condition1 S C EPS.")
    return RunConfig.model_validate(values)


def _lambda(values: Sequence[float]) -> complex:
    if len(values) not in (1, 2):
        raise UsageError("--lambda takes RE or RE IM.")
    return complex(values[0], values[1] if len(values) == 2 else 0.0)


def _test_function(args: argparse.Namespace) -> TestFunction:
    if args.function is not None:
        return load_test_function(args.function)
    if args.bump is not None:
        return bump(*args.bump)
    return gaussian_window(*args.gaussian)


def _potential(cfg: RunConfig) -> FourierPotential:
    assert cfg.potential is not None
    return load_potential(cfg.potential)


def dispatch(args: argparse.Namespace, cfg: RunConfig) -> Tuple[PipelineResult, bool]:
    """Run one subcommand; returns the result and whether it succeeded."""

    command = cfg.command
    if command == "selftest":
        outcomes = run_selftest(cfg.tracking())
        document = {"checks": [o.as_dict() for o in outcomes], "ok": all(o.ok for o in outcomes)}
        failed = [o.name for o in outcomes if not o.ok]
        summary = "all checks passed" if not failed else f"failed: {', '.join(failed)}"
        return PipelineResult(document=document, summary=summary), not failed

    pipeline = SpectralPipeline(diagnostics=cfg.diagnostics())
    if command == "discriminant":
        return pipeline.run_discriminant(_potential(cfg), _lambda(args.lam)), True
    if command == "bands":
        return pipeline.run_bands(_potential(cfg)), True
    if command == "singularities":
        curves = curves_from_document(load_document(args.bands)) if args.bands is not None else None
        return pipeline.run_singularities(_potential(cfg), curves), True
    if command == "check":
        if args.mathieu is not None:
            are, aim, bre, bim = args.mathieu
            return pipeline.run_check_two_term(complex(are, aim), complex(bre, bim), cfg.Q), True
        if args.alpha is not None:
            return pipeline.run_check_alpha(args.alpha, cfg.Q), True
        lo, hi = args.nrange
        s, c, eps = args.condition1
        return pipeline.run_check_condition1(_potential(cfg), s, c, eps, range(lo, hi + 1)), True
    pipeline.expansion = cfg.expansion(tuple(args.interval))
    return pipeline.run_expand(_potential(cfg), _test_function(args)), True


def emit(result: PipelineResult, cfg: RunConfig) -> None:
    if cfg.format == "csv":
        if result.csv is None:
            raise UsageError(f"{cfg.command} has no CSV output.")
        save_text(result.csv, cfg.out)
    elif cfg.out is not None or cfg.command not in SUMMARY_COMMANDS:
        save_document(result.document, cfg.out)
    if cfg.out is not None or cfg.command in SUMMARY_COMMANDS:
        print(result.summary)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Execute one command line; returns the process exit code."""

    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        configure_logging(args.log_level)
        cfg = run_config(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hillspec: error: {exc}", file=sys.stderr)
        return 1
    except (ValidationError, ValueError) as exc:
        print(f"hillspec: error: invalid options: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        result, ok = dispatch(args, cfg)
        emit(result, cfg)
    except (InputError, FileNotFoundError, ValidationError, ValueError) as exc:
        logger.debug("Input error", exc_info=True)
        print(f"hillspec: error: {exc}", file=sys.stderr)
        return 1
    except NumericalFailure as exc:
        logger.debug("Numerical failure", exc_info=True)
        print(f"hillspec: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if not ok:
        print(f"hillspec: {result.summary}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
