"""
Market file loading.

Reads the market JSON schema

    {"events": [{"label": str, "outcomes": [{"label": str, "p": num, "price": num}]}]}

strictly: unknown fields are an error. Probabilities are renormalized
only when the caller asks for it.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict

from packages.core.market_model.models import Event, Market, Outcome, OverroundPolicy

logger = logging.getLogger(__name__)


class _MarketDocument(BaseModel):
    """On-disk market schema (no policy field; policy comes from the caller)."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    events: tuple[Event, ...]


def load_market(
    source: str | Path | dict[str, Any],
    overround_policy: OverroundPolicy = OverroundPolicy.REQUIRE_STRICT,
    renormalize: bool = False,
) -> Market:
    """
    Load a market from a JSON file or an already-decoded object.

    Args:
        source: Path to a JSON file, or the decoded JSON object.
        overround_policy: Policy attached to the resulting market.
        renormalize: Divide each event's probabilities by their sum.

    Returns:
        The parsed Market.

    Raises:
        pydantic.ValidationError: On schema violations, including unknown fields.
        OSError / json.JSONDecodeError: When the file cannot be read or decoded.
    """
    if isinstance(source, dict):
        data = source
    else:
        data = json.loads(Path(source).read_text(encoding="utf-8"))

    document = _MarketDocument.model_validate(data)
    market = Market(events=document.events, overround_policy=overround_policy)

    if renormalize:
        market = renormalize_market(market)

    return market


def renormalize_market(market: Market) -> Market:
    """Scale each event's probabilities so that they sum to exactly one."""
    events = []
    for event in market.events:
        total = math.fsum(event.probabilities)
        if total <= 0.0:
            # Nothing sensible to scale; leave it for the validator to report.
            events.append(event)
            continue
        if total != 1.0:
            logger.info("Renormalizing event '%s' (probability sum %.17g)", event.label, total)
        events.append(
            Event(
                label=event.label,
                outcomes=tuple(
                    Outcome(label=o.label, p=o.p / total, price=o.price)
                    for o in event.outcomes
                ),
            )
        )
    return Market(events=tuple(events), overround_policy=market.overround_policy)


def dump_market(market: Market) -> dict[str, Any]:
    """Serialize a market back to the on-disk schema."""
    return {
        "events": [
            {
                "label": event.label,
                "outcomes": [
                    {"label": o.label, "p": o.p, "price": o.price}
                    for o in event.outcomes
                ],
            }
            for event in market.events
        ]
    }
