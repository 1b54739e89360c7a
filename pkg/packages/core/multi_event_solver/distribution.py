"""
Exact payout distributions.

Terminal wealth is cash plus one payout per event, and events are
independent, so the law of wealth (and of every background wealth
that leaves some events out) is a convolution of small per-event
distributions. Atoms are merged only on exact value equality, never
within a tolerance, so results do not depend on the order in which
events are folded in beyond floating-point addition itself.
"""

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from packages.core.market_model.models import Event, Market, Portfolio
from packages.core.market_model.utility import admits_zero_wealth
from packages.core.support_selector.selector import EventSupport


# -----------------------------
# Errors
# -----------------------------


class AtomBudgetExceeded(Exception):
    """Raised when a convolution would produce more atoms than allowed."""

    def __init__(self, atoms: int, max_atoms: int):
        self.atoms = atoms
        self.max_atoms = max_atoms
        super().__init__(
            f"convolution needs up to {atoms} atoms, above the limit of {max_atoms}"
        )


class NonpositiveWealth(Exception):
    """Raised when an expectation would evaluate utility outside its wealth domain."""

    pass


# -----------------------------
# Distribution
# -----------------------------


@dataclass(frozen=True, eq=False)
class PayoutDistribution:
    """
    Finite distribution with strictly increasing values.

    Build through `from_atoms` or `point_mass`; both sort and merge.
    """

    values: np.ndarray
    probs: np.ndarray

    @classmethod
    def from_atoms(cls, values, probs) -> "PayoutDistribution":
        """Sort ascending and collapse exactly equal values by summing probabilities."""
        values = np.asarray(values, dtype=float).ravel()
        probs = np.asarray(probs, dtype=float).ravel()
        if values.shape != probs.shape:
            raise ValueError("values and probs must have the same length")
        unique, inverse = np.unique(values, return_inverse=True)
        merged = np.bincount(inverse.ravel(), weights=probs, minlength=unique.size)
        return cls(values=unique, probs=merged)

    @classmethod
    def point_mass(cls, value: float = 0.0) -> "PayoutDistribution":
        return cls(values=np.array([float(value)]), probs=np.array([1.0]))

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def atoms(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.values.tolist(), self.probs.tolist()))

    @property
    def total_probability(self) -> float:
        return math.fsum(self.probs.tolist())

    @property
    def min_value(self) -> float:
        return float(self.values[0])

    def __repr__(self) -> str:
        return f"PayoutDistribution({list(self.atoms)!r})"


# -----------------------------
# Construction
# -----------------------------


def event_payout_distribution(
    event: Event,
    wagers: Sequence[float],
    support: EventSupport | None = None,
) -> PayoutDistribution:
    """
    Law of the payout g_{X} of one event.

    Args:
        event: The event whose outcome picks the payout.
        wagers: Wager per outcome, in the event's original order.
        support: When given, wagers outside it must be zero.

    Returns:
        Atom (g_i, p_i) per outcome, equal payouts merged.
    """
    if len(wagers) != event.size:
        raise ValueError(
            f"event '{event.label}' has {event.size} outcomes but {len(wagers)} wagers"
        )
    if any(g < 0.0 for g in wagers):
        raise ValueError(f"event '{event.label}' has a negative wager")
    if support is not None:
        for i in support.inactive:
            if wagers[i] != 0.0:
                raise ValueError(
                    f"event '{event.label}': outcome '{event.outcomes[i].label}' "
                    "is outside the support but carries a wager"
                )
    return PayoutDistribution.from_atoms(wagers, event.probabilities)


def convolve(
    a: PayoutDistribution,
    b: PayoutDistribution,
    max_atoms: int = 10_000_000,
) -> PayoutDistribution:
    """
    Exact law of the sum of two independent payouts.

    Raises:
        AtomBudgetExceeded: If len(a) * len(b) exceeds max_atoms.
    """
    atoms = a.size * b.size
    if atoms > max_atoms:
        raise AtomBudgetExceeded(atoms, max_atoms)
    values = np.add.outer(a.values, b.values)
    probs = np.multiply.outer(a.probs, b.probs)
    return PayoutDistribution.from_atoms(values, probs)


def convolve_all(
    parts: Sequence[PayoutDistribution],
    cash: float = 0.0,
    max_atoms: int = 10_000_000,
) -> PayoutDistribution:
    """Cash as a point mass, then each part folded in left to right."""
    dist = PayoutDistribution.point_mass(cash)
    for part in parts:
        dist = convolve(dist, part, max_atoms=max_atoms)
    return dist


# -----------------------------
# Expectations
# -----------------------------


def expectation(
    dist: PayoutDistribution,
    fn: Callable[[np.ndarray], np.ndarray],
    shift: float = 0.0,
    allow_zero: bool = False,
) -> float:
    """
    E[fn(shift + V)], summed in ascending-value order with math.fsum.

    Raises:
        NonpositiveWealth: If shift + V < 0 for some atom, or == 0 unless
            allow_zero is set.
    """
    wealth = shift + dist.values
    floor = float(wealth[0])
    if floor < 0.0 or (floor == 0.0 and not allow_zero):
        raise NonpositiveWealth(
            f"wealth {float(wealth[0])!r} <= 0 at shift {shift!r}"
        )
    terms = dist.probs * np.asarray(fn(wealth), dtype=float)
    return math.fsum(terms.tolist())


def expected_marginal(dist: PayoutDistribution, shift: float, utility) -> float:
    """E[U'(shift + V)]; zero wealth is allowed when U'(0) is finite."""
    return expectation(dist, utility.marginal, shift, allow_zero=admits_zero_wealth(utility))


def enumerate_expectation(
    market: Market,
    portfolio: Portfolio,
    fn: Callable[[float], float],
    exclude: Sequence[int] = (),
    include_cash: bool = True,
) -> float:
    """
    E[fn(wealth)] by walking every product state directly.

    Events listed in `exclude` are left out, which gives the
    background wealth seen by those events. Slow; for cross-checks.
    """
    skip = set(exclude)
    kept = [l for l in range(market.size) if l not in skip]
    base = portfolio.cash if include_cash else 0.0
    terms = []
    for state in itertools.product(*(range(market.events[l].size) for l in kept)):
        wealth = base
        prob = 1.0
        for l, i in zip(kept, state):
            wealth += portfolio.wagers[l][i]
            prob *= market.events[l].outcomes[i].p
        terms.append(prob * float(fn(wealth)))
    return math.fsum(terms)
