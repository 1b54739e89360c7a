"""
Tests for Support Selector.

Tests that the greedy prefix rule picks the right active outcomes
and that the simultaneous support is the eventwise union.
"""

import numpy as np
import pytest

from packages.core.support_selector import (
    DegenerateDenominator,
    SupportSelector,
    check_threshold_feasibility,
    simultaneous_support,
    single_event_support,
    threshold,
)
from tests.core.market_factory import (
    kelly_event,
    make_event,
    make_market,
    random_market,
)


# -----------------------------
# Fixtures
# -----------------------------


@pytest.fixture
def selector() -> SupportSelector:
    return SupportSelector()


@pytest.fixture
def tie_event():
    """Edge ratios 1.5, 0.5, 0.25; after the first outcome the threshold is exactly 0.5."""
    return make_event("tie", (0.75, 0.125, 0.125), (0.5, 0.25, 0.5))


# -----------------------------
# Threshold Tests
# -----------------------------


class TestThreshold:
    def test_empty_prefix(self) -> None:
        assert threshold(0.0, 0.0) == 1.0

    def test_examples(self) -> None:
        assert threshold(0.6, 0.5) == pytest.approx(0.8, rel=1e-15)
        assert threshold(0.9, 0.8) == pytest.approx(0.5, rel=1e-14)

    def test_degenerate(self) -> None:
        with pytest.raises(DegenerateDenominator):
            threshold(0.5, 1.0)


# -----------------------------
# Single Event Tests
# -----------------------------


class TestSingleEventSupport:
    """Greedy stopping rule on one event."""

    def test_one_active_outcome(self) -> None:
        k, state = single_event_support(kelly_event())
        assert k == 1
        assert state.P == 0.6
        assert state.Q == 0.5

    def test_all_cash(self) -> None:
        k, state = single_event_support(make_event("e", (0.5, 0.5), (0.55, 0.55)))
        assert k == 0
        assert (state.P, state.Q) == (0.0, 0.0)

    def test_favourite_only(self) -> None:
        k, _ = single_event_support(make_event("e", (0.9, 0.1), (0.8, 0.3)))
        assert k == 1

    def test_prefix_in_sorted_order(self) -> None:
        """Outcomes given worst first still yield the best as the prefix."""
        event = make_event("e", (0.2, 0.3, 0.5), (0.3, 0.35, 0.4))
        support = SupportSelector().select_event(event)
        assert support.k == 2
        assert support.active == (2, 1)
        assert support.inactive == (0,)
        assert support.threshold == pytest.approx(0.8)
        assert support.margin == pytest.approx(0.2 / 0.3 - 0.8)

    def test_equality_at_threshold_is_inactive(self, tie_event) -> None:
        support = SupportSelector().select_event(tie_event)
        assert support.threshold == 0.5
        assert support.ratios[1] == 0.5
        assert support.k == 1
        assert support.margin == 0.0

    def test_price_mass_reaching_one_is_degenerate(self) -> None:
        """Probabilities overshooting one let the prefix exhaust the price mass."""
        event = make_event("e", (0.6, 0.6, 0.1), (0.5, 0.5, 0.1))
        with pytest.raises(DegenerateDenominator) as info:
            single_event_support(event)
        assert info.value.event == "e"


# -----------------------------
# Simultaneous Support Tests
# -----------------------------


class TestSimultaneousSupport:
    def test_two_copies(self) -> None:
        family = simultaneous_support(make_market(kelly_event("a"), kelly_event("b")))
        assert family.prefix_lengths == (1, 1)
        assert family.as_pairs() == frozenset({(0, 0), (1, 0)})

    def test_mixed(self) -> None:
        market = make_market(make_event("cash", (0.5, 0.5), (0.55, 0.55)), kelly_event("bet"))
        family = simultaneous_support(market)
        assert family.prefix_lengths == (0, 1)
        assert family.contains(1, 0)
        assert not family.contains(0, 0)

    def test_all_ratios_below_one(self) -> None:
        market = make_market(
            make_event("a", (0.5, 0.5), (0.55, 0.55)),
            make_event("b", (0.3, 0.7), (0.35, 0.75)),
        )
        assert simultaneous_support(market).prefix_lengths == (0, 0)

    def test_idempotent(self, selector: SupportSelector) -> None:
        market = random_market(np.random.default_rng(7), events=3)
        assert selector.select(market) == selector.select(market)

    def test_prefix_support_and_with_event(self, selector: SupportSelector) -> None:
        market = make_market(kelly_event("a"), kelly_event("b"))
        family = selector.select(market)
        narrowed = family.with_event(1, selector.prefix_support(market.events[1], 0))
        assert narrowed.prefix_lengths == (1, 0)
        assert family.prefix_lengths == (1, 1)
        with pytest.raises(ValueError):
            selector.prefix_support(market.events[0], 3)


class TestThresholdFeasibility:
    """The selected prefix satisfies the threshold inequalities."""

    @pytest.mark.parametrize("seed", range(25))
    def test_random_markets(self, selector: SupportSelector, seed: int) -> None:
        market = random_market(np.random.default_rng(seed))
        for support in selector.select(market).events:
            assert check_threshold_feasibility(support)
            assert support.active == support.order[: support.k]

    def test_wrong_prefix_fails_check(self, selector: SupportSelector) -> None:
        event = make_event("e", (0.2, 0.3, 0.5), (0.3, 0.35, 0.4))
        assert check_threshold_feasibility(selector.prefix_support(event, 2))
        assert not check_threshold_feasibility(selector.prefix_support(event, 0))
        assert not check_threshold_feasibility(selector.prefix_support(event, 1))
