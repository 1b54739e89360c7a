"""Market builders shared by the core tests."""

from pathlib import Path

import numpy as np

from packages.core.market_model.models import Event, Market, Outcome, OverroundPolicy

DATA_DIR = Path(__file__).resolve().parents[2] / "data" / "markets"


def make_event(label: str, probs, prices, names=None) -> Event:
    names = names or [f"o{i}" for i in range(len(probs))]
    return Event(
        label=label,
        outcomes=tuple(
            Outcome(label=name, p=float(p), price=float(price))
            for name, p, price in zip(names, probs, prices)
        ),
    )


def make_market(*events: Event, policy=OverroundPolicy.REQUIRE_STRICT) -> Market:
    return Market(events=tuple(events), overround_policy=policy)


def single_event_market(probs, prices, policy=OverroundPolicy.REQUIRE_STRICT) -> Market:
    return make_market(make_event("e0", probs, prices), policy=policy)


def kelly_event(label: str = "e0") -> Event:
    """p=(0.6,0.4), prices=(0.5,0.55): k=1, log cash 0.8."""
    return make_event(label, (0.6, 0.4), (0.5, 0.55))


def random_market(
    rng: np.random.Generator,
    events: int | None = None,
    overround: tuple[float, float] = (1.02, 1.20),
) -> Market:
    """
    Pseudo-random strictly overround market.

    One to three events of two to six outcomes; edge ratios drawn from
    [0.5, 1.5] before the prices are scaled to the drawn overround.
    """
    m = int(rng.integers(1, 4)) if events is None else events
    built = []
    for l in range(m):
        n = int(rng.integers(2, 7))
        weights = rng.uniform(0.5, 1.5, n)
        probs = weights / weights.sum()
        ratios = rng.uniform(0.5, 1.5, n)
        raw = probs / ratios
        prices = raw * (rng.uniform(*overround) / raw.sum())
        built.append(make_event(f"e{l}", probs, prices))
    return make_market(*built)


def random_markets(count: int, seed: int = 20240611) -> list[Market]:
    rng = np.random.default_rng(seed)
    return [random_market(rng) for _ in range(count)]
