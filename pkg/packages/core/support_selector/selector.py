"""
Support Selector.

Determines the active outcome set of every event from probabilities
and prices alone. After sorting an event by decreasing edge ratio the
active set is a prefix, grown greedily while the next ratio beats the
threshold (1 - P_k) / (1 - Q_k) of the current prefix. The
simultaneous support is the eventwise union of single-event supports,
so no utility enters the computation.
"""

import logging
from dataclasses import dataclass, replace

from packages.core.market_model.models import Event, Market
from packages.core.market_model.ordering import edge_ratio, sort_event

logger = logging.getLogger(__name__)


# -----------------------------
# Data structures
# -----------------------------


@dataclass(frozen=True)
class PrefixState:
    """Length and cumulative masses of a sorted prefix."""

    k: int
    P: float  # probability mass of the prefix
    Q: float  # price mass of the prefix


@dataclass(frozen=True)
class EventSupport:
    """
    Active prefix of one event.

    `order` maps sorted position to original outcome index; the first
    `state.k` entries are active.
    """

    label: str
    order: tuple[int, ...]
    ratios: tuple[float, ...]  # edge ratios in sorted order
    state: PrefixState
    threshold: float
    margin: float | None  # r_{k+1} - threshold, None when every outcome is active

    @property
    def k(self) -> int:
        return self.state.k

    @property
    def active(self) -> tuple[int, ...]:
        """Original indices of active outcomes, best edge ratio first."""
        return self.order[: self.state.k]

    @property
    def inactive(self) -> tuple[int, ...]:
        return self.order[self.state.k :]


@dataclass(frozen=True)
class SupportFamily:
    """Per-event active prefixes for a whole market."""

    events: tuple[EventSupport, ...]

    @property
    def prefix_lengths(self) -> tuple[int, ...]:
        return tuple(e.k for e in self.events)

    def active_outcomes(self, event_index: int) -> tuple[int, ...]:
        return self.events[event_index].active

    def contains(self, event_index: int, outcome_index: int) -> bool:
        return outcome_index in self.events[event_index].active

    def as_pairs(self) -> frozenset[tuple[int, int]]:
        """(event, outcome) pairs of every active outcome."""
        return frozenset(
            (l, i) for l, e in enumerate(self.events) for i in e.active
        )

    def with_event(self, event_index: int, support: EventSupport) -> "SupportFamily":
        events = list(self.events)
        events[event_index] = support
        return replace(self, events=tuple(events))


# -----------------------------
# Errors
# -----------------------------


class DegenerateDenominator(Exception):
    """Raised when a threshold is needed for a prefix with price mass >= 1."""

    def __init__(self, Q: float, event: str | None = None):
        self.Q = Q
        self.event = event
        where = f" in event '{event}'" if event is not None else ""
        super().__init__(
            f"prefix price mass Q={Q:.17g} >= 1{where}: fair or sub-fair prefix, "
            "threshold (1-P)/(1-Q) undefined"
        )


# -----------------------------
# Threshold rule
# -----------------------------


def threshold(P: float, Q: float) -> float:
    """
    (1 - P) / (1 - Q), the edge ratio a new outcome must beat.

    Raises:
        DegenerateDenominator: If Q >= 1.
    """
    if Q >= 1.0:
        raise DegenerateDenominator(Q)
    return (1.0 - P) / (1.0 - Q)


def _prefix_state(event: Event, order: tuple[int, ...], k: int) -> PrefixState:
    P = 0.0
    Q = 0.0
    for i in order[:k]:
        P += event.outcomes[i].p
        Q += event.outcomes[i].price
    return PrefixState(k=k, P=P, Q=Q)


def _event_support(event: Event, order: tuple[int, ...], state: PrefixState) -> EventSupport:
    ratios = tuple(edge_ratio(event.outcomes[i]) for i in order)
    try:
        theta = threshold(state.P, state.Q)
    except DegenerateDenominator as e:
        raise DegenerateDenominator(e.Q, event.label) from e
    margin = ratios[state.k] - theta if state.k < len(order) else None
    return EventSupport(
        label=event.label,
        order=order,
        ratios=ratios,
        state=state,
        threshold=theta,
        margin=margin,
    )


def single_event_support(event: Event) -> tuple[int, PrefixState]:
    """
    Greedy prefix for one event.

    Returns the smallest k with k = n or r_{k+1} <= (1 - P_k)/(1 - Q_k).
    Equality stops the loop: an outcome exactly at the threshold stays
    inactive, which keeps the support unique.

    Raises:
        DegenerateDenominator: If Q_k >= 1 while more outcomes remain.
    """
    order = sort_event(event)
    P = 0.0
    Q = 0.0
    k = 0
    while k < len(order):
        if Q >= 1.0:
            raise DegenerateDenominator(Q, event.label)
        outcome = event.outcomes[order[k]]
        if edge_ratio(outcome) <= (1.0 - P) / (1.0 - Q):
            break
        P += outcome.p
        Q += outcome.price
        k += 1
    return k, PrefixState(k=k, P=P, Q=Q)


def check_threshold_feasibility(support: EventSupport) -> bool:
    """
    Whether active ratios strictly beat the threshold and the next one does not.
    """
    k = support.k
    active_ok = all(r > support.threshold for r in support.ratios[:k])
    next_ok = k == len(support.ratios) or support.ratios[k] <= support.threshold
    return active_ok and next_ok


# -----------------------------
# Selector
# -----------------------------


class SupportSelector:
    """
    Computes the utility-invariant support of a market.

    Events are handled independently; nothing flows between them.
    """

    def select_event(self, event: Event) -> EventSupport:
        """Run the stopping rule on one event and package the result."""
        order = sort_event(event)
        k, state = single_event_support(event)
        support = _event_support(event, order, state)
        logger.debug(
            "Event '%s': k=%d P=%.17g Q=%.17g threshold=%.17g",
            event.label,
            k,
            state.P,
            state.Q,
            support.threshold,
        )
        return support

    def select(self, market: Market) -> SupportFamily:
        """
        Eventwise union of single-event supports.

        Raises:
            DegenerateDenominator: Tagged with the offending event label.
        """
        family = SupportFamily(events=tuple(self.select_event(e) for e in market.events))
        logger.info("Selected support prefix lengths %s", family.prefix_lengths)
        return family

    def prefix_support(self, event: Event, k: int) -> EventSupport:
        """
        The sorted prefix of length k, whether or not the stopping rule picks it.

        Used to pose deliberately wrong supports and to describe
        arbitrary feasible portfolios.
        """
        if not 0 <= k <= event.size:
            raise ValueError(f"prefix length {k} outside 0..{event.size}")
        order = sort_event(event)
        return _event_support(event, order, _prefix_state(event, order, k))


def simultaneous_support(market: Market) -> SupportFamily:
    """Select the support of every event in the market."""
    return SupportSelector().select(market)
