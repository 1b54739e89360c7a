"""Market, utility and portfolio models with input validation."""

from .loader import dump_market, load_market, renormalize_market
from .models import Event, Market, Outcome, OverroundPolicy, Portfolio
from .ordering import edge_ratio, sort_event
from .utility import (
    CrraUtility,
    LogUtility,
    NegExpUtility,
    UtilityDomainError,
    UtilityKind,
    UtilitySpec,
    admits_zero_wealth,
    parse_utility,
    utility_from_flags,
)
from .validator import (
    IssueCode,
    MarketValidationError,
    MarketValidator,
    Severity,
    ValidationIssue,
    ValidationReport,
    validate_market,
)

__all__ = [
    "CrraUtility",
    "Event",
    "IssueCode",
    "LogUtility",
    "Market",
    "MarketValidationError",
    "MarketValidator",
    "NegExpUtility",
    "Outcome",
    "OverroundPolicy",
    "Portfolio",
    "Severity",
    "UtilityDomainError",
    "UtilityKind",
    "UtilitySpec",
    "ValidationIssue",
    "ValidationReport",
    "admits_zero_wealth",
    "dump_market",
    "edge_ratio",
    "load_market",
    "parse_utility",
    "renormalize_market",
    "sort_event",
    "utility_from_flags",
    "validate_market",
]
