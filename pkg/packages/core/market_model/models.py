"""
Market models for simultaneous independent-event wagering.

These models define the ONLY structured input the solvers accept:
events with outcome probabilities and state prices, plus the
portfolio that the solvers produce.

Construction is structural only. Semantic checks (positivity,
probability sums, overround) live in the market validator so that
invalid inputs can be reported rather than rejected at parse time.
"""

import math
from dataclasses import dataclass
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


# -----------------------------
# Enums
# -----------------------------


class OverroundPolicy(str, Enum):
    """How events with total state price at or below one are treated."""

    REQUIRE_STRICT = "require_strict"
    ALLOW_WITH_WARNING = "allow_with_warning"


# -----------------------------
# Market Nodes
# -----------------------------


class Outcome(BaseModel):
    """
    A single outcome of an event.

    Examples:
        {"label": "home", "p": 0.6, "price": 0.5}
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    label: str
    p: float = Field(..., description="Subjective probability")
    price: float = Field(..., description="State price of a unit claim")

    @property
    def edge_ratio(self) -> float:
        """Probability per unit of state price."""
        return self.p / self.price


class Event(BaseModel):
    """
    An event with finitely many mutually exclusive outcomes.

    Outcome order is the caller's order; solvers sort internally and
    report results back in this order.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    label: str
    outcomes: tuple[Outcome, ...]

    @property
    def size(self) -> int:
        return len(self.outcomes)

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(o.p for o in self.outcomes)

    @property
    def prices(self) -> tuple[float, ...]:
        return tuple(o.price for o in self.outcomes)

    @property
    def edge_ratios(self) -> tuple[float, ...]:
        return tuple(o.edge_ratio for o in self.outcomes)

    @property
    def probability_sum(self) -> float:
        return sum(self.probabilities)

    @property
    def price_sum(self) -> float:
        return sum(self.prices)

    @property
    def overround(self) -> float:
        """Excess of total state price over one (the vigorish)."""
        return self.price_sum - 1.0


class Market(BaseModel):
    """
    Root object: independent events priced simultaneously.

    Produced by the market loader and consumed by the validator,
    the support selector and every solver.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    events: tuple[Event, ...] = Field(..., description="Independent events")
    overround_policy: OverroundPolicy = Field(
        default=OverroundPolicy.REQUIRE_STRICT,
        description="Whether events with total price <= 1 are errors or warnings",
    )

    @property
    def size(self) -> int:
        return len(self.events)

    @property
    def product_state_count(self) -> int:
        """Number of joint outcomes across all events."""
        count = 1
        for event in self.events:
            count *= event.size
        return count


# -----------------------------
# Portfolio
# -----------------------------


@dataclass(frozen=True)
class Portfolio:
    """
    Cash plus nonnegative per-outcome wagers.

    `wagers[l][i]` is the wager on outcome i of event l, in the
    event's original outcome order.
    """

    cash: float
    wagers: tuple[tuple[float, ...], ...]

    @classmethod
    def all_cash(cls, market: Market) -> "Portfolio":
        """The portfolio that keeps the whole bankroll in cash."""
        return cls(
            cash=1.0,
            wagers=tuple(tuple(0.0 for _ in e.outcomes) for e in market.events),
        )

    def wagers_for(self, event_index: int) -> tuple[float, ...]:
        return self.wagers[event_index]

    def cost(self, market: Market) -> float:
        """Total state-price cost of the wagers."""
        return math.fsum(
            o.price * g
            for event, wagers in zip(market.events, self.wagers)
            for o, g in zip(event.outcomes, wagers)
        )

    def budget_residual(self, market: Market) -> float:
        """Left side minus right side of the bankroll constraint."""
        return self.cash + self.cost(market) - 1.0

    def min_wealth(self) -> float:
        """
        Smallest terminal wealth over all product states.

        Events are independent and every product state occurs, so the
        minimum is cash plus each event's smallest payout.
        """
        return self.cash + sum(min(w) for w in self.wagers if w)

    def positive_wagers(self, eps: float = 0.0) -> frozenset[tuple[int, int]]:
        """(event, outcome) pairs whose wager exceeds eps."""
        return frozenset(
            (l, i)
            for l, wagers in enumerate(self.wagers)
            for i, g in enumerate(wagers)
            if g > eps
        )
