"""
Tests for exact payout distributions and the expectation engine.
"""

import math

import numpy as np
import pytest

from packages.core.config import SolverSettings
from packages.core.market_model import CrraUtility, LogUtility, NegExpUtility, Portfolio
from packages.core.multi_event_solver import (
    AtomBudgetExceeded,
    ExpectationEngine,
    NonpositiveWealth,
    PayoutDistribution,
    convolve,
    convolve_all,
    enumerate_expectation,
    event_payout_distribution,
    expectation,
    expected_marginal,
)
from packages.core.support_selector import SupportSelector
from tests.core.market_factory import kelly_event, make_event, make_market, random_market


# -----------------------------
# Fixtures
# -----------------------------


@pytest.fixture
def kelly_payout() -> PayoutDistribution:
    return event_payout_distribution(kelly_event(), (0.4, 0.0))


def random_feasible_portfolio(market, rng: np.random.Generator, spend: float = 0.6) -> Portfolio:
    """Positive wagers on every outcome, cash = 1 - spend."""
    raw = [rng.uniform(0.1, 1.0, event.size) for event in market.events]
    cost = sum(float(np.dot(w, event.prices)) for w, event in zip(raw, market.events))
    wagers = tuple(tuple((w * spend / cost).tolist()) for w in raw)
    return Portfolio(cash=1.0 - spend, wagers=wagers)


# -----------------------------
# Construction Tests
# -----------------------------


class TestPayoutDistribution:
    def test_single_event(self, kelly_payout: PayoutDistribution) -> None:
        assert kelly_payout.atoms == ((0.0, 0.4), (0.4, 0.6))

    def test_equal_payouts_merge(self) -> None:
        event = make_event("e", (0.5, 0.3, 0.2), (0.5, 0.4, 0.3))
        dist = event_payout_distribution(event, (0.2, 0.2, 0.0))
        assert dist.values.tolist() == [0.0, 0.2]
        assert dist.probs.tolist() == pytest.approx([0.2, 0.8])

    def test_sorted_ascending(self) -> None:
        dist = PayoutDistribution.from_atoms([3.0, 1.0, 2.0, 1.0], [0.1, 0.2, 0.3, 0.4])
        assert dist.values.tolist() == [1.0, 2.0, 3.0]
        assert dist.probs.tolist() == pytest.approx([0.6, 0.3, 0.1])

    def test_wager_validation(self) -> None:
        event = kelly_event()
        with pytest.raises(ValueError):
            event_payout_distribution(event, (0.4,))
        with pytest.raises(ValueError):
            event_payout_distribution(event, (0.4, -0.1))

    def test_wager_off_support_rejected(self) -> None:
        event = kelly_event()
        support = SupportSelector().select_event(event)
        with pytest.raises(ValueError):
            event_payout_distribution(event, (0.4, 0.1), support=support)


# -----------------------------
# Convolution Tests
# -----------------------------


class TestConvolve:
    def test_two_copies(self, kelly_payout: PayoutDistribution) -> None:
        dist = convolve(kelly_payout, kelly_payout)
        assert dist.values.tolist() == [0.0, 0.4, 0.8]
        assert dist.probs.tolist() == pytest.approx([0.16, 0.48, 0.36], abs=1e-15)
        assert dist.total_probability == pytest.approx(1.0, abs=1e-15)

    def test_point_mass_is_identity(self, kelly_payout: PayoutDistribution) -> None:
        dist = convolve(PayoutDistribution.point_mass(0.0), kelly_payout)
        assert dist.atoms == kelly_payout.atoms

    def test_cash_shifts_values(self, kelly_payout: PayoutDistribution) -> None:
        dist = convolve_all([kelly_payout], cash=0.8)
        assert dist.values.tolist() == pytest.approx([0.8, 1.2])
        assert dist.min_value == 0.8

    def test_atom_budget(self, kelly_payout: PayoutDistribution) -> None:
        with pytest.raises(AtomBudgetExceeded) as info:
            convolve_all([kelly_payout] * 3, max_atoms=4)
        assert info.value.max_atoms == 4


# -----------------------------
# Expectation Tests
# -----------------------------


class TestExpectation:
    def test_expected_marginal(self) -> None:
        dist = PayoutDistribution.from_atoms([0.0, 1.0], [0.5, 0.5])
        assert expected_marginal(dist, 1.0, LogUtility()) == 0.75

    def test_nonpositive_wealth(self, kelly_payout: PayoutDistribution) -> None:
        with pytest.raises(NonpositiveWealth):
            expectation(kelly_payout, LogUtility().value)

    def test_zero_wealth_under_neg_exp(self) -> None:
        """U'(0) = a is finite, so a zero-wealth atom is a valid state."""
        dist = PayoutDistribution.from_atoms([0.0, 1.0], [0.25, 0.75])
        utility = NegExpUtility(a=2.0)
        expected = 0.25 * 2.0 + 0.75 * 2.0 * math.exp(-2.0)
        assert expected_marginal(dist, 0.0, utility) == pytest.approx(expected, rel=1e-15)
        with pytest.raises(NonpositiveWealth):
            expected_marginal(dist, 0.0, LogUtility())

    def test_negative_wealth_always_rejected(self) -> None:
        dist = PayoutDistribution.from_atoms([0.0, 1.0], [0.5, 0.5])
        with pytest.raises(NonpositiveWealth):
            expected_marginal(dist, -0.5, NegExpUtility(a=1.0))

    def test_kelly_solution_marginal(self, kelly_payout: PayoutDistribution) -> None:
        """At the log optimum E[U'(W)] = lambda = 1."""
        assert expected_marginal(kelly_payout, 0.8, LogUtility()) == pytest.approx(1.0, rel=1e-15)


class TestExpectationEngine:
    @pytest.mark.parametrize("seed", range(5))
    def test_matches_enumeration(self, seed: int) -> None:
        rng = np.random.default_rng(seed)
        market = random_market(rng, events=3)
        portfolio = random_feasible_portfolio(market, rng)
        utility = CrraUtility(gamma=3.0)
        engine = ExpectationEngine(market, portfolio, utility)

        assert engine.expected_value() == pytest.approx(
            enumerate_expectation(market, portfolio, utility.value), rel=1e-12
        )
        assert engine.expected_marginal() == pytest.approx(
            enumerate_expectation(market, portfolio, utility.marginal), rel=1e-12
        )
        for l in range(market.size):
            assert engine.continuation(l) == pytest.approx(
                enumerate_expectation(market, portfolio, utility.marginal, exclude=(l,)),
                rel=1e-12,
            )

    def test_pair_background(self) -> None:
        market = make_market(kelly_event("a"), kelly_event("b"), kelly_event("c"))
        portfolio = Portfolio(cash=0.4, wagers=((0.4, 0.0),) * 3)
        pair = ExpectationEngine(market, portfolio, LogUtility()).pair_background(2, 0)
        assert pair.atoms == ((0.4, 0.4), (0.8, 0.6))

    def test_threads_do_not_change_results(self) -> None:
        rng = np.random.default_rng(3)
        market = random_market(rng, events=3)
        portfolio = random_feasible_portfolio(market, rng)
        single = ExpectationEngine(market, portfolio, LogUtility(), SolverSettings(threads=1))
        pooled = ExpectationEngine(market, portfolio, LogUtility(), SolverSettings(threads=4))
        for a, b in zip(single.backgrounds(), pooled.backgrounds()):
            assert a.values.tolist() == b.values.tolist()
            assert a.probs.tolist() == b.probs.tolist()

    def test_all_cash_wealth_is_point_mass(self) -> None:
        market = make_market(kelly_event("a"), kelly_event("b"))
        engine = ExpectationEngine(market, Portfolio.all_cash(market), LogUtility())
        assert engine.wealth().atoms == ((1.0, 1.0),)
        assert math.isclose(engine.expected_value(), 0.0, abs_tol=1e-15)
