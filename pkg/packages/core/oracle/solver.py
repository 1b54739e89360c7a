"""
Brute-force oracle.

Solves the full wagering program with every outcome as a variable and
no support theory: expectations come from direct enumeration of the
product states, and the optimizer is projected-gradient ascent on the
cash-eliminated problem over {g >= 0, pi . g <= 1}. It shares nothing
with the support selector or the convolution engine, so agreement
between the two paths is meaningful.
"""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from packages.core.config import SolverSettings, get_settings
from packages.core.market_model.models import Market, Portfolio
from packages.core.market_model.ordering import sort_event
from packages.core.market_model.utility import admits_zero_wealth

logger = logging.getLogger(__name__)

_ARMIJO = 1e-4
_NONMONOTONE_WINDOW = 10
_MIN_STEP = 1e-16
_STEP_BOUNDS = (1e-10, 1e10)
_ROUNDOFF = 4.0 * np.finfo(float).eps


# -----------------------------
# Errors
# -----------------------------


class OracleLimitExceeded(Exception):
    """Raised when the market has too many product states to enumerate."""

    pass


class OracleNoConvergence(Exception):
    """Raised when no start reaches the projected-gradient tolerance."""

    def __init__(self, message: str, solution: "OracleSolution"):
        self.solution = solution
        super().__init__(message)


# -----------------------------
# Result
# -----------------------------


@dataclass(frozen=True)
class OracleSolution:
    """Best portfolio found by the oracle, with its extracted support."""

    portfolio: Portfolio
    objective: float
    support: frozenset[tuple[int, int]]
    lam: float | None  # E[U'(W)], only when cash is above activity_eps
    expected_marginal: float
    start: int
    iterations: int
    pg_norm: float
    converged: bool
    largest_inactive: float  # biggest wager at or below activity_eps
    smallest_active: float | None  # smallest wager above activity_eps
    support_is_prefix: bool

    @property
    def ambiguity_gap(self) -> float | None:
        """Distance between the activity classes; small values mean a fuzzy support."""
        if self.smallest_active is None:
            return None
        return self.smallest_active - self.largest_inactive


# -----------------------------
# State space
# -----------------------------


class _StateSpace:
    """Every product state as a row of flat outcome indices, with its probability."""

    def __init__(self, market: Market):
        self.offsets = np.cumsum([0] + [e.size for e in market.events])
        self.prices = np.array([o.price for e in market.events for o in e.outcomes])
        flat_probs = np.array([o.p for e in market.events for o in e.outcomes])
        states = list(itertools.product(*(range(e.size) for e in market.events)))
        self.columns = np.array(states, dtype=np.int64) + self.offsets[:-1]
        self.probs = np.prod(flat_probs[self.columns], axis=1)
        self.dim = int(self.prices.size)
        self.events = market.size

    def cash(self, g: np.ndarray) -> float:
        return max(0.0, 1.0 - math.fsum((self.prices * g).tolist()))

    def wealth(self, g: np.ndarray) -> np.ndarray:
        return self.cash(g) + g[self.columns].sum(axis=1)

    def objective(self, g: np.ndarray, utility) -> float:
        return math.fsum((self.probs * utility.value(self.wealth(g))).tolist())

    def gradient(self, g: np.ndarray, utility) -> tuple[np.ndarray, float]:
        """Cash-eliminated gradient and E[U'(W)]."""
        weighted = self.probs * utility.marginal(self.wealth(g))
        em = math.fsum(weighted.tolist())
        per_outcome = np.bincount(
            self.columns.ravel(),
            weights=np.repeat(weighted, self.events),
            minlength=self.dim,
        )
        return per_outcome - self.prices * em, em


def project_budget(y: np.ndarray, prices: np.ndarray) -> np.ndarray:
    """
    Euclidean projection onto {g >= 0, prices . g <= 1}.

    When the clipped point overspends, the projection is max(y - tau prices, 0)
    with tau > 0 chosen so the budget binds.
    """
    clipped = np.maximum(y, 0.0)
    if float(prices @ clipped) <= 1.0:
        return clipped

    def spend(tau: float) -> float:
        return float(prices @ np.maximum(y - tau * prices, 0.0)) - 1.0

    hi = float(np.max(y / prices))
    tau = brentq(spend, 0.0, hi, xtol=1e-300, rtol=_ROUNDOFF)
    return np.maximum(y - tau * prices, 0.0)


# -----------------------------
# Oracle
# -----------------------------


@dataclass
class _Run:
    g: np.ndarray
    objective: float
    iterations: int
    pg_norm: float
    converged: bool


class BruteForceOracle:
    """Projected-gradient ascent over all outcomes from several starts."""

    def __init__(self, settings: SolverSettings | None = None):
        self._settings = settings or get_settings()

    def solve(self, market: Market, utility) -> OracleSolution:
        """
        Raises:
            OracleLimitExceeded: If the product-state count is above oracle_max_states.
            OracleNoConvergence: If no start converges; carries the best solution.
        """
        settings = self._settings
        states = market.product_state_count
        if states > settings.oracle_max_states:
            raise OracleLimitExceeded(
                f"market has {states} product states; oracle limit is "
                f"{settings.oracle_max_states}"
            )

        space = _StateSpace(market)
        runs = [self._ascend(space, utility, start) for start in self._starts(space)]
        best_index = max(
            range(len(runs)), key=lambda s: (runs[s].converged, runs[s].objective)
        )
        solution = self._package(market, space, utility, runs[best_index], best_index)
        logger.info(
            "Oracle best start %d: objective=%.17g pg=%.3e support size %d",
            best_index,
            solution.objective,
            solution.pg_norm,
            len(solution.support),
        )
        if not solution.converged:
            raise OracleNoConvergence(
                f"no oracle start reached projected-gradient norm {settings.oracle_pg_tol:g}",
                solution,
            )
        return solution

    def _starts(self, space: _StateSpace) -> list[np.ndarray]:
        """All-cash, then one random feasible start with cash >= 0.5 per seed."""
        starts = [np.zeros(space.dim)]
        for seed in self._settings.oracle_seeds:
            rng = np.random.default_rng(seed)
            direction = rng.random(space.dim)
            spend = 0.5 * rng.random()
            starts.append(direction * (spend / float(space.prices @ direction)))
        return starts

    def _ascend(self, space: _StateSpace, utility, g: np.ndarray) -> _Run:
        settings = self._settings
        prices = space.prices
        value = space.objective(g, utility)
        grad, _ = space.gradient(g, utility)
        zero_ok = admits_zero_wealth(utility)
        step = 1.0
        history = [value]
        pg_norm = math.inf

        for iteration in range(settings.oracle_max_iters):
            pg_norm = float(np.max(np.abs(project_budget(g + grad, prices) - g), initial=0.0))
            if pg_norm <= settings.oracle_pg_tol:
                return _Run(g, value, iteration, pg_norm, True)

            direction = project_budget(g + step * grad, prices) - g
            slope = float(grad @ direction)
            reference = max(history[-_NONMONOTONE_WINDOW:])
            slack = _ROUNDOFF * max(1.0, abs(reference))

            t = 1.0
            while t > _MIN_STEP:
                trial = g + t * direction
                floor = float(np.min(space.wealth(trial)))
                if floor > 0.0 or (zero_ok and floor == 0.0):
                    trial_value = space.objective(trial, utility)
                    if trial_value >= reference + _ARMIJO * t * slope - slack:
                        break
                t *= 0.5
            else:
                logger.debug("Oracle line search stalled at iteration %d", iteration)
                return _Run(g, value, iteration, pg_norm, False)

            trial_grad, _ = space.gradient(trial, utility)
            s = trial - g
            y = trial_grad - grad
            sy = float(s @ y)
            # Spectral step; concavity makes s . y negative.
            step = (
                float(np.clip(float(s @ s) / -sy, *_STEP_BOUNDS)) if sy < 0.0 else _STEP_BOUNDS[1]
            )
            g, value, grad = trial, trial_value, trial_grad
            history.append(value)

        return _Run(g, value, settings.oracle_max_iters, pg_norm, False)

    def _package(
        self,
        market: Market,
        space: _StateSpace,
        utility,
        run: _Run,
        start: int,
    ) -> OracleSolution:
        eps = self._settings.activity_eps
        cash = space.cash(run.g)
        wagers = tuple(
            tuple(run.g[space.offsets[l] : space.offsets[l + 1]].tolist())
            for l in range(market.size)
        )
        portfolio = Portfolio(cash=cash, wagers=wagers)
        support = portfolio.positive_wagers(eps)
        _, em = space.gradient(run.g, utility)

        flat = run.g.tolist()
        inactive = [g for g in flat if g <= eps]
        active = [g for g in flat if g > eps]

        return OracleSolution(
            portfolio=portfolio,
            objective=run.objective,
            support=support,
            lam=em if cash > eps else None,
            expected_marginal=em,
            start=start,
            iterations=run.iterations,
            pg_norm=run.pg_norm,
            converged=run.converged,
            largest_inactive=max(inactive, default=0.0),
            smallest_active=min(active, default=None),
            support_is_prefix=_is_prefix(market, support),
        )


def _is_prefix(market: Market, support: frozenset[tuple[int, int]]) -> bool:
    for l, event in enumerate(market.events):
        active = {i for (m, i) in support if m == l}
        if active != set(sort_event(event)[: len(active)]):
            return False
    return True


def oracle_solve(
    market: Market,
    utility,
    settings: SolverSettings | None = None,
) -> OracleSolution:
    """Run the brute-force oracle on a market."""
    return BruteForceOracle(settings=settings).solve(market, utility)
