"""
First-order and threshold-identity diagnostics.

Given any feasible portfolio and a support family, this module
measures how far the portfolio is from the optimality conditions:
active stationarity, reduced costs of inactive outcomes, the
continuation factor of each event and the identity

    lambda (1 - Q) = (1 - P) K + nu

with nu = 0 whenever cash is interior. The conditioning decomposition
of E[U'(W)] over each event is also reported; it holds at every
feasible point, optimal or not.
"""

import logging
import math
from dataclasses import dataclass

from packages.core.config import SolverSettings, get_settings
from packages.core.market_model.models import Market, Portfolio
from packages.core.multi_event_solver.distribution import NonpositiveWealth
from packages.core.multi_event_solver.expectations import ExpectationEngine
from packages.core.support_selector.selector import EventSupport, SupportFamily

logger = logging.getLogger(__name__)


INTERIOR = "interior"
BOUNDARY = "boundary"


# -----------------------------
# Data structures
# -----------------------------


@dataclass(frozen=True)
class EventDiagnostics:
    """Per-event block of a solve report."""

    label: str
    k: int
    P: float
    Q: float
    threshold: float
    margin: float | None  # r_{k+1} - threshold
    K: float
    lam_over_K: float
    identity_residual: float
    conditioning_residual: float
    stationarity_residuals: tuple[tuple[int, float], ...]  # (outcome, relative residual)
    reduced_cost_margins: tuple[tuple[int, float], ...]  # (outcome, lambda pi - p K)
    corrected_threshold: float | None = None  # boundary regime only


@dataclass(frozen=True)
class BoundaryBlock:
    active: bool
    nu: float | None = None


@dataclass(frozen=True)
class KktReport:
    """Optimality diagnostics of one portfolio against one support family."""

    lam: float
    expected_marginal: float
    objective: float
    regime: str
    boundary: BoundaryBlock
    events: tuple[EventDiagnostics, ...]

    @property
    def max_identity_residual(self) -> float:
        return max((e.identity_residual for e in self.events), default=0.0)

    @property
    def max_conditioning_residual(self) -> float:
        return max((e.conditioning_residual for e in self.events), default=0.0)

    @property
    def max_stationarity_residual(self) -> float:
        return max(
            (r for e in self.events for _, r in e.stationarity_residuals), default=0.0
        )

    @property
    def min_reduced_cost_margin(self) -> float:
        return min(
            (m for e in self.events for _, m in e.reduced_cost_margins),
            default=math.inf,
        )


@dataclass(frozen=True)
class SolveReport:
    """Portfolio of a fixed-support solve together with its diagnostics."""

    portfolio: Portfolio
    support: SupportFamily
    kkt: KktReport
    iterations: int
    converged: bool
    oracle_recommended: bool = False

    @property
    def cash(self) -> float:
        return self.portfolio.cash

    @property
    def lam(self) -> float:
        return self.kkt.lam

    @property
    def objective(self) -> float:
        return self.kkt.objective

    @property
    def regime(self) -> str:
        return self.kkt.regime

    @property
    def boundary(self) -> BoundaryBlock:
        return self.kkt.boundary

    @property
    def events(self) -> tuple[EventDiagnostics, ...]:
        return self.kkt.events


# -----------------------------
# Continuation factor
# -----------------------------


def continuation_factor(
    market: Market,
    portfolio: Portfolio,
    event_index: int,
    utility,
    settings: SolverSettings | None = None,
) -> float:
    """
    K_l = E_{-l}[U'(R_l)], with cash folded into R_l.

    Raises:
        AtomBudgetExceeded: If the background distribution is too large.
        NonpositiveWealth: If R_l can be zero.
    """
    engine = ExpectationEngine(market, portfolio, utility, settings=settings)
    return engine.continuation(event_index)


def _safe_continuation(engine: ExpectationEngine, event_index: int) -> float:
    # Background wealth can be exactly zero when cash is at its bound.
    try:
        return engine.continuation(event_index)
    except NonpositiveWealth:
        return math.inf


def _boundary_multiplier(
    market: Market,
    portfolio: Portfolio,
    support: SupportFamily,
    engine: ExpectationEngine,
) -> float | None:
    """lambda from the stationarity equation of the first active outcome."""
    for l, event_support in enumerate(support.events):
        if event_support.active:
            i = event_support.active[0]
            outcome = market.events[l].outcomes[i]
            g = portfolio.wagers[l][i]
            return outcome.p * engine.conditional_marginal(l, g) / outcome.price
    return None


# -----------------------------
# Report
# -----------------------------


def kkt_and_identity_report(
    market: Market,
    portfolio: Portfolio,
    support: SupportFamily,
    utility,
    settings: SolverSettings | None = None,
    boundary: bool | None = None,
    engine: ExpectationEngine | None = None,
) -> KktReport:
    """
    Diagnose a feasible portfolio against a support family.

    Args:
        market: The market the portfolio trades in.
        portfolio: Any feasible portfolio.
        support: Family whose active sets contain every positive wager.
        utility: Utility specification.
        settings: Tolerances; defaults to get_settings().
        boundary: Force the c = 0 treatment. None decides from the cash level.
        engine: Prebuilt expectation engine for this portfolio.

    Returns:
        KktReport with lambda, nu and per-event blocks. Never raises for
        data problems; unreachable quantities come back as inf.
    """
    settings = settings or get_settings()
    engine = engine or ExpectationEngine(market, portfolio, utility, settings=settings)
    if boundary is None:
        boundary = portfolio.cash <= settings.boundary_cash_tol

    em = engine.expected_marginal()
    lam = em
    nu = None
    if boundary:
        estimate = _boundary_multiplier(market, portfolio, support, engine)
        if estimate is not None:
            lam = estimate
            nu = lam - em
        else:
            boundary = False

    events = tuple(
        _event_block(market, portfolio, l, event_support, engine, lam, em, nu or 0.0, boundary)
        for l, event_support in enumerate(support.events)
    )

    report = KktReport(
        lam=lam,
        expected_marginal=em,
        objective=engine.expected_value(),
        regime=BOUNDARY if boundary else INTERIOR,
        boundary=BoundaryBlock(active=boundary, nu=nu),
        events=events,
    )
    logger.debug(
        "KKT report: lambda=%.17g regime=%s max identity residual=%.3e",
        lam,
        report.regime,
        report.max_identity_residual,
    )
    return report


def _event_block(
    market: Market,
    portfolio: Portfolio,
    event_index: int,
    event_support: EventSupport,
    engine: ExpectationEngine,
    lam: float,
    em: float,
    nu: float,
    boundary: bool,
) -> EventDiagnostics:
    event = market.events[event_index]
    wagers = portfolio.wagers[event_index]
    K = _safe_continuation(engine, event_index)

    inactive = event_support.inactive
    inactive_mass = math.fsum(event.outcomes[j].p for j in inactive)
    inactive_term = inactive_mass * K if inactive else 0.0
    one_minus_q = 1.0 - event_support.state.Q

    stationarity = []
    active_terms = []
    for i in event_support.active:
        outcome = event.outcomes[i]
        term = outcome.p * engine.conditional_marginal(event_index, wagers[i])
        active_terms.append(term)
        stationarity.append((i, abs(term - lam * outcome.price) / lam))

    margins = tuple(
        (j, lam * event.outcomes[j].price - event.outcomes[j].p * K) for j in inactive
    )

    identity = abs(lam * one_minus_q - inactive_term - nu) / lam
    conditioning = abs(em - math.fsum(active_terms + [inactive_term])) / em

    corrected = None
    if boundary and math.isfinite(K) and K > 0.0:
        corrected = event_support.threshold + nu / (one_minus_q * K)

    return EventDiagnostics(
        label=event.label,
        k=event_support.k,
        P=event_support.state.P,
        Q=event_support.state.Q,
        threshold=event_support.threshold,
        margin=event_support.margin,
        K=K,
        lam_over_K=lam / K if K > 0.0 else math.inf,
        identity_residual=identity,
        conditioning_residual=conditioning,
        stationarity_residuals=tuple(stationarity),
        reduced_cost_margins=margins,
        corrected_threshold=corrected,
    )
