"""
Command-line front end.

    kelly_support {support|solve|verify|oracle} --input market.json [options]

Reports go to stdout (JSON by default, rich tables with --format table);
logs go to stderr. Exit codes: 0 ok, 2 validation or limit error,
3 degeneracy, 4 no convergence, 5 verify mismatch.
"""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path

from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler

from packages.cli.render import (
    render_comparison,
    render_oracle,
    render_solve,
    render_support,
)
from packages.core.config import SolverSettings, get_settings
from packages.core.explainability import ReportBuilder, to_json
from packages.core.market_model import (
    OverroundPolicy,
    load_market,
    utility_from_flags,
)
from packages.core.pipeline import (
    DEGENERACY,
    LIMIT_EXCEEDED,
    NO_CONVERGENCE,
    VALIDATION_ERROR,
    VERIFY_MISMATCH,
    PipelineResult,
    WageringService,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERACY = 3
EXIT_NO_CONVERGENCE = 4
EXIT_VERIFY_MISMATCH = 5

EXIT_CODES = {
    VALIDATION_ERROR: EXIT_VALIDATION,
    LIMIT_EXCEEDED: EXIT_VALIDATION,
    DEGENERACY: EXIT_DEGENERACY,
    NO_CONVERGENCE: EXIT_NO_CONVERGENCE,
    VERIFY_MISMATCH: EXIT_VERIFY_MISMATCH,
}


# -----------------------------
# Configuration
# -----------------------------


@dataclass(frozen=True)
class CliConfig:
    """Everything one invocation needs, parsed from argv."""

    command: str
    input: Path
    utility: str
    gamma: float | None
    a: float | None
    tol: float | None
    max_atoms: int | None
    output_format: str
    renormalize: bool
    overround_policy: OverroundPolicy
    verbose: bool

    def settings(self) -> SolverSettings:
        """Cached settings with the command-line overrides applied."""
        update = {}
        if self.tol is not None:
            update["stationarity_tol"] = self.tol
        if self.max_atoms is not None:
            update["max_atoms"] = self.max_atoms
        base = get_settings()
        return base.model_copy(update=update) if update else base


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, type=Path, help="Market JSON file")
    common.add_argument(
        "--utility",
        choices=["log", "crra", "neg_exp"],
        default="log",
        help="Utility family (default: log)",
    )
    common.add_argument("--gamma", type=float, help="Relative risk aversion for crra")
    common.add_argument("--a", type=float, help="Absolute risk aversion for neg_exp")
    common.add_argument("--tol", type=float, help="Stationarity tolerance override")
    common.add_argument("--max-atoms", type=int, help="Atom limit for exact expectations")
    common.add_argument("--format", choices=["json", "table"], default="json")
    common.add_argument(
        "--renormalize",
        action="store_true",
        help="Divide each event's probabilities by their sum",
    )
    common.add_argument(
        "--allow-subfair",
        action="store_true",
        help="Accept events whose prices sum to 1 or less, with a warning",
    )
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(
        prog="kelly_support",
        description="Support selection and exact solves for simultaneous independent wagers",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("support", parents=[common], help="Print the utility-invariant support")
    sub.add_parser("solve", parents=[common], help="Solve on the selected support")
    sub.add_parser("verify", parents=[common], help="Cross-check the solve against the oracle")
    sub.add_parser("oracle", parents=[common], help="Run the brute-force oracle alone")
    return parser


def parse_config(argv: Sequence[str] | None = None) -> CliConfig:
    args = build_parser().parse_args(argv)
    return CliConfig(
        command=args.command,
        input=args.input,
        utility=args.utility,
        gamma=args.gamma,
        a=args.a,
        tol=args.tol,
        max_atoms=args.max_atoms,
        output_format=args.format,
        renormalize=args.renormalize,
        overround_policy=(
            OverroundPolicy.ALLOW_WITH_WARNING
            if args.allow_subfair
            else OverroundPolicy.REQUIRE_STRICT
        ),
        verbose=args.verbose,
    )


def configure_logging(verbose: bool) -> None:
    """Route all logging to stderr through rich so stdout carries only reports."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


# -----------------------------
# Output
# -----------------------------


def _emit(config: CliConfig, payload: dict, render: Callable[[Console, dict], None]) -> None:
    if config.output_format == "json":
        sys.stdout.write(to_json(payload) + "\n")
    else:
        render(Console(), payload)


def _emit_error(config: CliConfig, result: PipelineResult) -> int:
    code = EXIT_CODES.get(result.error_type, EXIT_VALIDATION)
    if config.output_format == "json":
        sys.stdout.write(
            to_json({"error": result.error, "error_type": result.error_type}) + "\n"
        )
    else:
        Console(stderr=True).print(f"[red]{result.error_type}[/red]: {result.error}")
    return code


def _load(config: CliConfig):
    return load_market(
        config.input,
        overround_policy=config.overround_policy,
        renormalize=config.renormalize,
    )


def _utility(config: CliConfig):
    return utility_from_flags(config.utility, gamma=config.gamma, a=config.a)


# -----------------------------
# Commands
# -----------------------------


def cmd_support(config: CliConfig) -> int:
    market = _load(config)
    result = WageringService(settings=config.settings()).support(market)
    if not result.success:
        return _emit_error(config, result)
    _emit(config, ReportBuilder(market).support_dict(result.family), render_support)
    return EXIT_OK


def cmd_solve(config: CliConfig) -> int:
    market = _load(config)
    utility = _utility(config)
    result = WageringService(settings=config.settings()).solve(market, utility)
    if result.report is None:
        return _emit_error(config, result)

    # No-convergence still prints the best iterate's diagnostics.
    builder = ReportBuilder(market)
    payload = builder.solve_dict(result.report, utility.label)
    _emit(config, payload, render_solve)
    if config.output_format == "table":
        Console().print(
            builder.to_natural_language(result.report, utility.label),
            markup=False,
            highlight=False,
            soft_wrap=True,
        )
    if not result.success:
        logger.error("%s", result.error)
        return EXIT_CODES[result.error_type]
    return EXIT_OK


def cmd_verify(config: CliConfig) -> int:
    market = _load(config)
    utility = _utility(config)
    result = WageringService(settings=config.settings()).verify(market, utility)
    if result.comparison is None:
        return _emit_error(config, result)

    builder = ReportBuilder(market)
    payload = builder.comparison_dict(result.comparison)
    _emit(config, payload, render_comparison)
    return EXIT_OK if result.success else EXIT_CODES[result.error_type]


def cmd_oracle(config: CliConfig) -> int:
    market = _load(config)
    utility = _utility(config)
    result = WageringService(settings=config.settings()).oracle(market, utility)
    if result.oracle is None:
        return _emit_error(config, result)
    _emit(config, ReportBuilder(market).oracle_dict(result.oracle), render_oracle)
    return EXIT_OK if result.success else EXIT_CODES[result.error_type]


COMMANDS: dict[str, Callable[[CliConfig], int]] = {
    "support": cmd_support,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


def main(argv: Sequence[str] | None = None) -> int:
    config = parse_config(argv)
    configure_logging(config.verbose)
    try:
        return COMMANDS[config.command](config)
    except (ValidationError, ValueError, OSError) as e:
        # Schema violations, bad utility flags and unreadable files.
        logger.error("%s", e)
        if config.output_format == "json":
            sys.stdout.write(to_json({"error": str(e), "error_type": VALIDATION_ERROR}) + "\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
