"""
Fixed-support solver for the simultaneous problem.

On a given support family the problem is smooth and strictly concave
in the active wagers once cash is eliminated through the budget,
c = 1 - pi . x. The solver runs damped Newton on that reduced problem,
keeping wagers and wealth positive by fraction-to-boundary truncation
and Armijo backtracking. If cash is driven to zero the solver pins
c = 0 and continues with an equality-constrained Newton step on
pi . x = 1, reporting the boundary slack nu. That face is reachable
when some event has every outcome active, or when U'(0) is finite
(neg_exp), where zero wealth in the all-inactive state costs a
bounded amount of utility.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from packages.core.config import SolverSettings, get_settings
from packages.core.market_model.models import Market, Portfolio
from packages.core.market_model.utility import admits_zero_wealth
from packages.core.multi_event_solver.diagnostics import (
    SolveReport,
    kkt_and_identity_report,
)
from packages.core.multi_event_solver.distribution import NonpositiveWealth
from packages.core.multi_event_solver.expectations import ExpectationEngine
from packages.core.support_selector.selector import SupportFamily

logger = logging.getLogger(__name__)

_ARMIJO = 1e-4
_FRACTION_TO_BOUNDARY = 0.99
_MIN_STEP = 1e-16
_ROUNDOFF = 4.0 * np.finfo(float).eps
_LEAVE_BOUNDARY_SHRINK = 1.0 - 1e-6


# -----------------------------
# Errors
# -----------------------------


class NoConvergence(Exception):
    """Raised when the solver stops short of the stationarity target."""

    def __init__(self, message: str, report: SolveReport):
        self.report = report
        super().__init__(message)


# -----------------------------
# Reduced problem
# -----------------------------


@dataclass(frozen=True, eq=False)
class Derivatives:
    """First and second derivatives of E[U(W)] at one point."""

    full_gradient: np.ndarray  # dPhi/dx with cash held fixed
    full_hessian: np.ndarray
    cash_cross: np.ndarray  # d2Phi/dx dc
    cash_curvature: float  # d2Phi/dc2
    expected_marginal: float  # dPhi/dc


class ReducedProblem:
    """
    E[U(W)] as a function of the active wager vector.

    Coordinates follow the support family: events in order, and within
    an event the active outcomes best edge ratio first.
    """

    def __init__(
        self,
        market: Market,
        support: SupportFamily,
        utility,
        settings: SolverSettings | None = None,
    ):
        self.market = market
        self.support = support
        self.utility = utility
        self.settings = settings or get_settings()
        self.pairs = tuple(
            (l, i) for l, event_support in enumerate(support.events) for i in event_support.active
        )
        self.prices = np.array([market.events[l].outcomes[i].price for l, i in self.pairs])
        self.probs = np.array([market.events[l].outcomes[i].p for l, i in self.pairs])

    @property
    def dim(self) -> int:
        return len(self.pairs)

    @property
    def has_full_event(self) -> bool:
        """Whether some event has every outcome active, so c = 0 keeps wealth positive."""
        return any(
            s.k == e.size for s, e in zip(self.support.events, self.market.events)
        )

    @property
    def cash_can_vanish(self) -> bool:
        """Whether c = 0 leaves expected utility finite."""
        return self.has_full_event or admits_zero_wealth(self.utility)

    def wealth_admissible(self, portfolio: Portfolio) -> bool:
        floor = portfolio.min_wealth()
        return floor > 0.0 or (floor == 0.0 and admits_zero_wealth(self.utility))

    def cash_of(self, x: np.ndarray) -> float:
        return 1.0 - math.fsum((self.prices * x).tolist())

    def portfolio(self, x: np.ndarray, cash: float | None = None) -> Portfolio:
        if cash is None:
            cash = self.cash_of(x)
        wagers = [[0.0] * event.size for event in self.market.events]
        for (l, i), g in zip(self.pairs, x.tolist()):
            wagers[l][i] = g
        return Portfolio(cash=cash, wagers=tuple(tuple(w) for w in wagers))

    def engine(self, x: np.ndarray, cash: float | None = None) -> ExpectationEngine:
        return ExpectationEngine(
            self.market, self.portfolio(x, cash), self.utility, settings=self.settings
        )

    # -----------------------------
    # Derivatives
    # -----------------------------

    def derivatives(self, engine: ExpectationEngine, x: np.ndarray) -> Derivatives:
        n = self.dim
        engine.backgrounds()
        F = np.empty(n)
        cross = np.empty(n)
        for a, ((l, _), g) in enumerate(zip(self.pairs, x.tolist())):
            F[a] = self.probs[a] * engine.conditional_marginal(l, g)
            cross[a] = self.probs[a] * engine.conditional_curvature(l, g)

        H = np.diag(cross)
        for a in range(n):
            for b in range(a + 1, n):
                la, lb = self.pairs[a][0], self.pairs[b][0]
                if la == lb:
                    continue  # outcomes of one event never pay together
                value = (
                    self.probs[a]
                    * self.probs[b]
                    * engine.pair_curvature(la, lb, float(x[a] + x[b]))
                )
                H[a, b] = H[b, a] = value

        return Derivatives(
            full_gradient=F,
            full_hessian=H,
            cash_cross=cross,
            cash_curvature=engine.expected_curvature(),
            expected_marginal=engine.expected_marginal(),
        )

    def reduce(self, d: Derivatives) -> tuple[np.ndarray, np.ndarray]:
        """Gradient and Hessian along c = 1 - pi . x."""
        pi = self.prices
        G = d.full_gradient - pi * d.expected_marginal
        H = (
            d.full_hessian
            - np.outer(d.cash_cross, pi)
            - np.outer(pi, d.cash_cross)
            + d.cash_curvature * np.outer(pi, pi)
        )
        return G, H

    def objective(self, x) -> float:
        """E[U(W)] with cash eliminated."""
        return self.engine(np.asarray(x, dtype=float)).expected_value()

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.reduce(self.derivatives(self.engine(x), x))[0]

    def hessian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.reduce(self.derivatives(self.engine(x), x))[1]

    def starting_point(self) -> np.ndarray:
        """
        Per-event log optimum g_i = r_i - threshold, scaled by 1/(m+1).

        Each event's log solution costs at most 1, so the scaled sum keeps
        cash at 1/(m+1) or more.
        """
        x = np.empty(self.dim)
        scale = 1.0 / (self.market.size + 1)
        for a, (l, i) in enumerate(self.pairs):
            event_support = self.support.events[l]
            ratio = self.market.events[l].outcomes[i].edge_ratio
            g = ratio - event_support.threshold
            x[a] = scale * (g if g > 0.0 else 0.5 * ratio)
        return x


# -----------------------------
# Solver
# -----------------------------


@dataclass
class _Iterate:
    x: np.ndarray
    cash: float
    boundary: bool
    objective: float


class FixedSupportSolver:
    """Damped Newton on the cash-eliminated problem of a fixed support."""

    def __init__(self, settings: SolverSettings | None = None):
        self._settings = settings or get_settings()

    def solve(self, market: Market, support: SupportFamily, utility) -> SolveReport:
        """
        Maximize E[U(W)] over the support family.

        Raises:
            AtomBudgetExceeded: If an expectation needs too many atoms.
            NoConvergence: After max_iters, carrying the best iterate's report.
        """
        settings = self._settings
        problem = ReducedProblem(market, support, utility, settings=settings)

        if problem.dim == 0:
            portfolio = Portfolio.all_cash(market)
            kkt = kkt_and_identity_report(market, portfolio, support, utility, settings)
            return SolveReport(portfolio, support, kkt, iterations=0, converged=True)

        x = problem.starting_point()
        boundary = False
        best: _Iterate | None = None
        pi = problem.prices

        for iteration in range(1, settings.max_iters + 1):
            cash = 0.0 if boundary else problem.cash_of(x)
            engine = problem.engine(x, cash)
            derivatives = problem.derivatives(engine, x)
            objective = engine.expected_value()
            if best is None or objective > best.objective:
                best = _Iterate(x.copy(), cash, boundary, objective)

            if boundary:
                F = derivatives.full_gradient
                lam = F[0] / pi[0]
                nu = lam - derivatives.expected_marginal
                if nu < -settings.stationarity_tol * max(1.0, lam):
                    logger.info("Cash leaves the boundary (nu=%.3e)", nu)
                    x = x * _LEAVE_BOUNDARY_SHRINK
                    boundary = False
                    continue
                residual = float(np.max(np.abs(F - lam * pi)))
                scale = max(1.0, lam)
            else:
                G, H = problem.reduce(derivatives)
                residual = float(np.max(np.abs(G)))
                scale = max(1.0, derivatives.expected_marginal)

            logger.debug(
                "iter %d: objective=%.17g cash=%.3e residual=%.3e boundary=%s",
                iteration,
                objective,
                cash,
                residual,
                boundary,
            )
            if residual <= settings.stationarity_tol * scale:
                final = _Iterate(x, cash, boundary, objective)
                return self._report(market, support, utility, problem, final, iteration, True)

            if boundary:
                d = self._boundary_direction(F, derivatives.full_hessian, pi)
                slope = float(F @ d)
            else:
                d = self._newton_direction(G, H)
                slope = float(G @ d)
                if (
                    cash < settings.boundary_cash_tol
                    and float(pi @ d) > 0.0
                    and problem.cash_can_vanish
                ):
                    logger.warning(
                        "Cash %.3e reached its bound; switching to the c = 0 regime", cash
                    )
                    x = x / math.fsum((pi * x).tolist())
                    boundary = True
                    continue

            step = self._line_search(problem, x, d, cash, boundary, objective, slope)
            if step == 0.0:
                logger.debug("Line search stalled at iteration %d", iteration)
                break
            x = x + step * d
            if boundary:
                x = x / math.fsum((pi * x).tolist())

        report = self._report(
            market, support, utility, problem, best, settings.max_iters, False
        )
        raise NoConvergence(
            f"fixed-support solve stopped short of tolerance {settings.stationarity_tol:g}",
            report,
        )

    # -----------------------------
    # Directions
    # -----------------------------

    def _newton_direction(self, G: np.ndarray, H: np.ndarray) -> np.ndarray:
        if np.all(np.isfinite(H)) and np.linalg.cond(H) <= self._settings.hessian_cond_limit:
            d = np.linalg.solve(H, -G)
            if float(G @ d) > 0.0:
                return d
        logger.debug("Hessian ill-conditioned; scaled gradient step")
        return G / -np.diag(H)

    def _boundary_direction(self, F: np.ndarray, H: np.ndarray, pi: np.ndarray) -> np.ndarray:
        """Newton step on pi . x = 1, from the KKT system [[H, -pi], [pi^T, 0]]."""
        n = F.size
        kkt = np.zeros((n + 1, n + 1))
        kkt[:n, :n] = H
        kkt[:n, n] = -pi
        kkt[n, :n] = pi
        rhs = np.concatenate([-F, [0.0]])
        if np.all(np.isfinite(kkt)) and np.linalg.cond(kkt) <= self._settings.hessian_cond_limit:
            d = np.linalg.solve(kkt, rhs)[:n]
            if float(F @ d) > 0.0:
                return d
        logger.debug("Boundary KKT system ill-conditioned; projected gradient step")
        projected = F - (float(pi @ F) / float(pi @ pi)) * pi
        return projected / -np.diag(H)

    # -----------------------------
    # Step control
    # -----------------------------

    def _line_search(
        self,
        problem: ReducedProblem,
        x: np.ndarray,
        d: np.ndarray,
        cash: float,
        boundary: bool,
        objective: float,
        slope: float,
    ) -> float:
        """Largest accepted step in (0, 1], or 0 when none is found."""
        step = 1.0
        shrinking = d < 0.0
        if np.any(shrinking):
            step = min(step, _FRACTION_TO_BOUNDARY * float(np.min(x[shrinking] / -d[shrinking])))
        if not boundary:
            cash_rate = -float(problem.prices @ d)
            if cash_rate < 0.0:
                step = min(step, _FRACTION_TO_BOUNDARY * cash / -cash_rate)

        slack = _ROUNDOFF * max(1.0, abs(objective))
        while step > _MIN_STEP:
            trial = x + step * d
            trial_cash = 0.0 if boundary else problem.cash_of(trial)
            portfolio = problem.portfolio(trial, trial_cash)
            if problem.wealth_admissible(portfolio):
                try:
                    value = ExpectationEngine(
                        problem.market, portfolio, problem.utility, settings=problem.settings
                    ).expected_value()
                except NonpositiveWealth:
                    value = -math.inf
                if value >= objective + _ARMIJO * step * slope - slack:
                    return step
            step *= 0.5
        return 0.0

    # -----------------------------
    # Reporting
    # -----------------------------

    def _report(
        self,
        market: Market,
        support: SupportFamily,
        utility,
        problem: ReducedProblem,
        iterate: _Iterate,
        iterations: int,
        converged: bool,
    ) -> SolveReport:
        portfolio = problem.portfolio(iterate.x, iterate.cash)
        kkt = kkt_and_identity_report(
            market,
            portfolio,
            support,
            utility,
            settings=self._settings,
            boundary=iterate.boundary,
        )
        if converged:
            logger.info(
                "Fixed-support solve converged in %d iterations (%s, lambda=%.17g)",
                iterations,
                kkt.regime,
                kkt.lam,
            )
        return SolveReport(
            portfolio=portfolio,
            support=support,
            kkt=kkt,
            iterations=iterations,
            converged=converged,
            oracle_recommended=iterate.boundary,
        )


def fixed_support_solve(
    market: Market,
    support: SupportFamily,
    utility,
    settings: SolverSettings | None = None,
) -> SolveReport:
    """Solve on a fixed support with a fresh FixedSupportSolver."""
    return FixedSupportSolver(settings=settings).solve(market, support, utility)
