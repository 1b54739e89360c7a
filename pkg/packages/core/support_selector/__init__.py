"""Utility-invariant support selection."""

from .selector import (
    DegenerateDenominator,
    EventSupport,
    PrefixState,
    SupportFamily,
    SupportSelector,
    check_threshold_feasibility,
    simultaneous_support,
    single_event_support,
    threshold,
)

__all__ = [
    "DegenerateDenominator",
    "EventSupport",
    "PrefixState",
    "SupportFamily",
    "SupportSelector",
    "check_threshold_feasibility",
    "simultaneous_support",
    "single_event_support",
    "threshold",
]
