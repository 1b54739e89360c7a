"""
Expectation engine for one portfolio.

Holds the per-event payout distributions of a portfolio and builds the
wealth law W = c + sum of payouts, the leave-one-out backgrounds R_l
and the leave-two-out backgrounds R_{l,l'} on demand. Leave-one-out
backgrounds are independent of each other and may be built on a
thread pool; results are stored by event index so the outcome does
not depend on scheduling.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

from packages.core.config import SolverSettings, get_settings
from packages.core.market_model.models import Market, Portfolio
from packages.core.market_model.utility import admits_zero_wealth
from packages.core.multi_event_solver.distribution import (
    PayoutDistribution,
    convolve_all,
    event_payout_distribution,
    expectation,
    expected_marginal,
)

logger = logging.getLogger(__name__)


class ExpectationEngine:
    """Exact expectations of utility terms for a fixed portfolio."""

    def __init__(
        self,
        market: Market,
        portfolio: Portfolio,
        utility,
        settings: SolverSettings | None = None,
    ):
        self._market = market
        self._portfolio = portfolio
        self._utility = utility
        self._settings = settings or get_settings()
        self._zero_ok = admits_zero_wealth(utility)
        self._payouts = tuple(
            event_payout_distribution(event, wagers)
            for event, wagers in zip(market.events, portfolio.wagers)
        )
        self._wealth: PayoutDistribution | None = None
        self._backgrounds: dict[int, PayoutDistribution] = {}
        self._pairs: dict[tuple[int, int], PayoutDistribution] = {}

    @property
    def portfolio(self) -> Portfolio:
        return self._portfolio

    @property
    def utility(self):
        return self._utility

    def payout(self, event_index: int) -> PayoutDistribution:
        return self._payouts[event_index]

    # -----------------------------
    # Distributions
    # -----------------------------

    def _fold(self, skip: tuple[int, ...]) -> PayoutDistribution:
        parts = [d for l, d in enumerate(self._payouts) if l not in skip]
        return convolve_all(
            parts, cash=self._portfolio.cash, max_atoms=self._settings.max_atoms
        )

    def wealth(self) -> PayoutDistribution:
        """Law of terminal wealth W."""
        if self._wealth is None:
            self._wealth = self._fold(())
        return self._wealth

    def background(self, event_index: int) -> PayoutDistribution:
        """Law of R_l: cash plus payouts of every other event."""
        if event_index not in self._backgrounds:
            self._backgrounds[event_index] = self._fold((event_index,))
        return self._backgrounds[event_index]

    def backgrounds(self) -> tuple[PayoutDistribution, ...]:
        """All leave-one-out backgrounds, in event order."""
        missing = [l for l in range(self._market.size) if l not in self._backgrounds]
        if missing:
            workers = min(self._settings.threads, len(missing))
            if workers > 1:
                logger.debug("Building %d backgrounds on %d threads", len(missing), workers)
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    built = list(pool.map(lambda l: self._fold((l,)), missing))
            else:
                built = [self._fold((l,)) for l in missing]
            for l, dist in zip(missing, built):
                self._backgrounds[l] = dist
        return tuple(self._backgrounds[l] for l in range(self._market.size))

    def pair_background(self, first: int, second: int) -> PayoutDistribution:
        """Law of cash plus payouts of every event except `first` and `second`."""
        key = (min(first, second), max(first, second))
        if key not in self._pairs:
            self._pairs[key] = self._fold(key)
        return self._pairs[key]

    # -----------------------------
    # Expectations
    # -----------------------------

    def expected_value(self) -> float:
        """Phi = E[U(W)]."""
        return expectation(self.wealth(), self._utility.value, allow_zero=self._zero_ok)

    def expected_marginal(self) -> float:
        """E[U'(W)]."""
        return expected_marginal(self.wealth(), 0.0, self._utility)

    def expected_curvature(self) -> float:
        """E[U''(W)]."""
        return expectation(self.wealth(), self._utility.curvature, allow_zero=self._zero_ok)

    def continuation(self, event_index: int) -> float:
        """K_l = E[U'(R_l)]."""
        return expected_marginal(self.background(event_index), 0.0, self._utility)

    def conditional_marginal(self, event_index: int, wager: float) -> float:
        """E_{-l}[U'(g + R_l)]."""
        return expected_marginal(self.background(event_index), wager, self._utility)

    def conditional_curvature(self, event_index: int, wager: float) -> float:
        """E_{-l}[U''(g + R_l)]."""
        return expectation(
            self.background(event_index), self._utility.curvature, wager, allow_zero=self._zero_ok
        )

    def pair_curvature(self, first: int, second: int, shift: float) -> float:
        """E[U''(shift + R_{l,l'})] over the events other than the pair."""
        return expectation(
            self.pair_background(first, second),
            self._utility.curvature,
            shift,
            allow_zero=self._zero_ok,
        )
