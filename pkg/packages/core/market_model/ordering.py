"""Edge ratios and the canonical per-event outcome order."""

from packages.core.market_model.models import Event, Outcome


def edge_ratio(outcome: Outcome) -> float:
    """p / price for a single outcome."""
    return outcome.p / outcome.price


def sort_event(event: Event) -> tuple[int, ...]:
    """
    Order outcome indices by decreasing edge ratio.

    Ties keep input order, so the permutation is deterministic and an
    event whose ratios are all equal maps to the identity.

    Args:
        event: A validated event.

    Returns:
        Original outcome indices, best edge ratio first.
    """
    ratios = [edge_ratio(o) for o in event.outcomes]
    return tuple(sorted(range(len(ratios)), key=lambda i: (-ratios[i], i)))
