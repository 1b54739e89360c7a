"""Cross-check of a fixed-support solve against the brute-force oracle."""

import logging
from dataclasses import dataclass

from packages.core.config import SolverSettings, get_settings
from packages.core.multi_event_solver.diagnostics import INTERIOR, SolveReport
from packages.core.oracle.solver import OracleSolution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComparisonReport:
    """Agreement between the solver path and the oracle path."""

    support_equal: bool
    solver_support: frozenset[tuple[int, int]]
    oracle_support: frozenset[tuple[int, int]]
    max_wager_deviation: float  # cash included
    objective_gap: float  # solver minus oracle
    multiplier_gap: float | None
    passed: bool

    @property
    def missing_from_solver(self) -> frozenset[tuple[int, int]]:
        return self.oracle_support - self.solver_support

    @property
    def extra_in_solver(self) -> frozenset[tuple[int, int]]:
        return self.solver_support - self.oracle_support


def compare(
    oracle: OracleSolution,
    report: SolveReport,
    settings: SolverSettings | None = None,
) -> ComparisonReport:
    """
    Compare supports, wagers, objective and multiplier of two solves.

    Both sides must come from the same market and utility. The check
    passes when the supports agree after activity_eps thresholding and
    the objectives agree within verify_objective_tol.
    """
    settings = settings or get_settings()
    solver_support = report.portfolio.positive_wagers(settings.activity_eps)

    deviations = [abs(report.portfolio.cash - oracle.portfolio.cash)]
    for mine, theirs in zip(report.portfolio.wagers, oracle.portfolio.wagers):
        deviations.extend(abs(a - b) for a, b in zip(mine, theirs))

    objective_gap = report.objective - oracle.objective
    multiplier_gap = None
    if oracle.lam is not None and report.regime == INTERIOR:
        multiplier_gap = abs(report.lam - oracle.lam)

    support_equal = solver_support == oracle.support
    passed = support_equal and abs(objective_gap) <= settings.verify_objective_tol

    comparison = ComparisonReport(
        support_equal=support_equal,
        solver_support=solver_support,
        oracle_support=oracle.support,
        max_wager_deviation=max(deviations),
        objective_gap=objective_gap,
        multiplier_gap=multiplier_gap,
        passed=passed,
    )
    if not passed:
        logger.warning(
            "Oracle mismatch: support_equal=%s objective_gap=%.3e",
            support_equal,
            objective_gap,
        )
    return comparison
