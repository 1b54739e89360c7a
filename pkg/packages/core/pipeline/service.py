"""
Wagering Service.

Orchestrates the full pipeline for one market:
1. Validate the market
2. Select the utility-invariant support
3. Solve on that support (single-event fast path when it applies)
4. Optionally run the brute-force oracle
5. Compare the two paths
"""

import logging
from dataclasses import dataclass

from packages.core.config import SolverSettings, get_settings
from packages.core.market_model.models import Market
from packages.core.market_model.utility import UtilityDomainError
from packages.core.market_model.validator import MarketValidator, ValidationReport
from packages.core.multi_event_solver.diagnostics import SolveReport, kkt_and_identity_report
from packages.core.multi_event_solver.distribution import AtomBudgetExceeded, NonpositiveWealth
from packages.core.multi_event_solver.solver import FixedSupportSolver, NoConvergence
from packages.core.oracle.compare import ComparisonReport, compare
from packages.core.oracle.solver import (
    BruteForceOracle,
    OracleLimitExceeded,
    OracleNoConvergence,
    OracleSolution,
)
from packages.core.single_event_solver.solver import (
    BracketFailure,
    BudgetViolation,
    SupportInconsistency,
    assemble_single,
    solve_lambda_single,
)
from packages.core.support_selector.selector import (
    DegenerateDenominator,
    SupportFamily,
    SupportSelector,
)

logger = logging.getLogger(__name__)

VALIDATION_ERROR = "validation_error"
DEGENERACY = "degeneracy"
NO_CONVERGENCE = "no_convergence"
VERIFY_MISMATCH = "verify_mismatch"
LIMIT_EXCEEDED = "limit_exceeded"


@dataclass
class PipelineResult:
    """Complete result of one pipeline run."""

    success: bool
    market: Market
    validation: ValidationReport | None = None
    family: SupportFamily | None = None
    report: SolveReport | None = None
    oracle: OracleSolution | None = None
    comparison: ComparisonReport | None = None
    error: str | None = None
    error_type: str | None = None


class WageringService:
    """
    Service for support selection, solving and verification.

    Every step reports failures through PipelineResult instead of
    raising, so callers can map error_type to exit codes.
    """

    def __init__(self, settings: SolverSettings | None = None):
        """
        Initialize the service.

        Args:
            settings: Solver settings. Uses get_settings() if not provided.
        """
        self._settings = settings or get_settings()
        self._validator = MarketValidator(settings=self._settings)
        self._selector = SupportSelector()
        self._solver = FixedSupportSolver(settings=self._settings)
        self._oracle = BruteForceOracle(settings=self._settings)

    # -------------------------
    # Public steps
    # -------------------------

    def support(self, market: Market) -> PipelineResult:
        """Validate, then select the support."""
        result = self._validate(market)
        if not result.success:
            return result
        return self._select(result)

    def solve(
        self,
        market: Market,
        utility,
        family: SupportFamily | None = None,
    ) -> PipelineResult:
        """
        Validate, select and solve.

        Args:
            market: Market to solve.
            utility: Utility specification.
            family: Support to solve on instead of the selected one.
        """
        result = self._validate(market)
        if not result.success:
            return result
        if family is None:
            result = self._select(result)
            if not result.success:
                return result
        else:
            result.family = family

        utility = utility.normalized()
        try:
            result.report = self.solve_on_support(market, result.family, utility)
        except NoConvergence as e:
            return self._fail(result, e, NO_CONVERGENCE, report=e.report)
        except AtomBudgetExceeded as e:
            return self._fail(result, e, LIMIT_EXCEEDED)
        except NonpositiveWealth as e:
            return self._fail(result, e, NO_CONVERGENCE)

        logger.info(
            "Solved under %s: cash=%.17g lambda=%.17g regime=%s",
            utility.label,
            result.report.cash,
            result.report.lam,
            result.report.regime,
        )
        return result

    def oracle(self, market: Market, utility) -> PipelineResult:
        """Validate, then run the brute-force oracle alone."""
        result = self._validate(market)
        if not result.success:
            return result
        try:
            result.oracle = self._oracle.solve(market, utility.normalized())
        except OracleLimitExceeded as e:
            return self._fail(result, e, LIMIT_EXCEEDED)
        except OracleNoConvergence as e:
            result.oracle = e.solution
            return self._fail(result, e, NO_CONVERGENCE)
        return result

    def verify(
        self,
        market: Market,
        utility,
        family: SupportFamily | None = None,
    ) -> PipelineResult:
        """Solve, run the oracle and compare the two."""
        if market.product_state_count > self._settings.oracle_max_states:
            return PipelineResult(
                success=False,
                market=market,
                error=(
                    f"market has {market.product_state_count} product states; "
                    f"oracle limit is {self._settings.oracle_max_states}"
                ),
                error_type=LIMIT_EXCEEDED,
            )

        result = self.solve(market, utility, family=family)
        if not result.success:
            return result

        oracle_result = self.oracle(market, utility)
        result.oracle = oracle_result.oracle
        if not oracle_result.success:
            result.success = False
            result.error = oracle_result.error
            result.error_type = oracle_result.error_type
            return result

        result.comparison = compare(result.oracle, result.report, settings=self._settings)
        if not result.comparison.passed:
            result.success = False
            result.error = (
                f"solver and oracle disagree: support_equal={result.comparison.support_equal}, "
                f"objective_gap={result.comparison.objective_gap:.3e}"
            )
            result.error_type = VERIFY_MISMATCH
        else:
            logger.info("Verification passed")
        return result

    def solve_on_support(self, market: Market, family: SupportFamily, utility) -> SolveReport:
        """
        Solve on a given support.

        A single event whose support leaves probability outside it goes
        through the scalar multiplier reduction; everything else, and any
        fast-path failure, goes through the fixed-support solver.
        """
        if market.size == 1 and family.events[0].state.P < 1.0:
            try:
                return self._solve_single(market, family, utility)
            except (
                BracketFailure,
                BudgetViolation,
                SupportInconsistency,
                UtilityDomainError,
            ) as e:
                logger.warning("Single-event fast path failed (%s); using Newton", e)
        return self._solver.solve(market, family, utility)

    # -------------------------
    # Internals
    # -------------------------

    def _solve_single(self, market: Market, family: SupportFamily, utility) -> SolveReport:
        event = market.events[0]
        state = family.events[0].state
        lam = solve_lambda_single(event, state, utility)
        solution = assemble_single(event, state, utility, lam, settings=self._settings)
        portfolio = solution.to_portfolio()
        kkt = kkt_and_identity_report(
            market,
            portfolio,
            family,
            utility,
            settings=self._settings,
            boundary=solution.boundary_cash,
        )
        return SolveReport(
            portfolio=portfolio,
            support=family,
            kkt=kkt,
            iterations=0,
            converged=True,
            oracle_recommended=solution.boundary_cash,
        )

    def _validate(self, market: Market) -> PipelineResult:
        report = self._validator.validate(market)
        result = PipelineResult(success=report.ok, market=market, validation=report)
        for issue in report.warnings:
            logger.warning("Market warning: %s", issue.describe())
        if not report.ok:
            result.error = "; ".join(issue.describe() for issue in report.errors)
            result.error_type = DEGENERACY if report.has_degeneracy else VALIDATION_ERROR
        return result

    def _select(self, result: PipelineResult) -> PipelineResult:
        try:
            result.family = self._selector.select(result.market)
        except DegenerateDenominator as e:
            return self._fail(result, e, DEGENERACY)
        return result

    @staticmethod
    def _fail(
        result: PipelineResult,
        error: Exception,
        error_type: str,
        report: SolveReport | None = None,
    ) -> PipelineResult:
        logger.error("%s: %s", error_type, error)
        result.success = False
        result.error = str(error)
        result.error_type = error_type
        if report is not None:
            result.report = report
        return result
