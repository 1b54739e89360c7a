"""
Market Validator.

Checks the modelling assumptions every solver relies on: positive
probabilities and prices, probabilities summing to one, distinct
labels, and strict overround under the require_strict policy.

Validation is report-valued. Callers that need a hard stop use
`ValidationReport.raise_for_errors()`.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

from packages.core.config import SolverSettings, get_settings
from packages.core.market_model.models import Event, Market, OverroundPolicy


# -----------------------------
# Errors
# -----------------------------


class MarketValidationError(Exception):
    """Raised when a market fails validation."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("; ".join(issue.describe() for issue in report.errors))


# -----------------------------
# Report Types
# -----------------------------


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


class IssueCode(str, Enum):
    """Machine-readable validation issue codes."""

    NO_EVENTS = "no_events"
    EMPTY_EVENT = "empty_event"
    NONPOSITIVE_PROBABILITY = "nonpositive_probability"
    NONPOSITIVE_PRICE = "nonpositive_price"
    PROBABILITY_SUM = "probability_sum"
    DUPLICATE_LABEL = "duplicate_label"
    OVERROUND = "overround"


@dataclass(frozen=True)
class ValidationIssue:
    """A single finding about a market."""

    severity: Severity
    code: IssueCode
    message: str
    event: str | None = None

    def describe(self) -> str:
        prefix = f"event '{self.event}': " if self.event is not None else ""
        return prefix + self.message


@dataclass(frozen=True)
class ValidationReport:
    """All findings for one market, in event order."""

    issues: tuple[ValidationIssue, ...] = field(default_factory=tuple)

    @property
    def errors(self) -> tuple[ValidationIssue, ...]:
        return tuple(i for i in self.issues if i.severity == Severity.ERROR)

    @property
    def warnings(self) -> tuple[ValidationIssue, ...]:
        return tuple(i for i in self.issues if i.severity == Severity.WARNING)

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def has_degeneracy(self) -> bool:
        """True when an error comes from a fair or sub-fair event."""
        return any(i.code == IssueCode.OVERROUND for i in self.errors)

    def raise_for_errors(self) -> None:
        if self.errors:
            raise MarketValidationError(self)


# -----------------------------
# Validator
# -----------------------------


class MarketValidator:
    """
    Validates Market objects against the model assumptions.

    Never mutates the market and never raises for data problems.
    """

    def __init__(self, settings: SolverSettings | None = None):
        """
        Initialize the validator.

        Args:
            settings: Solver settings (probability tolerance).
                     Uses the cached settings if not provided.
        """
        self._settings = settings or get_settings()

    def validate(self, market: Market) -> ValidationReport:
        """
        Validate the given market.

        Args:
            market: The market to check.

        Returns:
            ValidationReport listing errors and warnings.
        """
        issues: list[ValidationIssue] = []

        if not market.events:
            issues.append(
                ValidationIssue(Severity.ERROR, IssueCode.NO_EVENTS, "market has no events")
            )

        for event in market.events:
            issues.extend(self._validate_event(event, market.overround_policy))

        return ValidationReport(issues=tuple(issues))

    # -------------------------
    # Validation Methods
    # -------------------------

    def _validate_event(
        self, event: Event, policy: OverroundPolicy
    ) -> list[ValidationIssue]:
        """Validate one event."""
        if not event.outcomes:
            return [
                ValidationIssue(
                    Severity.ERROR, IssueCode.EMPTY_EVENT, "event has no outcomes", event.label
                )
            ]

        issues = self._validate_labels(event)
        issues.extend(self._validate_positivity(event))
        issues.extend(self._validate_probability_sum(event))
        issues.extend(self._validate_overround(event, policy))
        return issues

    def _validate_labels(self, event: Event) -> list[ValidationIssue]:
        """Outcome labels must be distinct within an event."""
        seen: set[str] = set()
        issues = []
        for outcome in event.outcomes:
            if outcome.label in seen:
                issues.append(
                    ValidationIssue(
                        Severity.ERROR,
                        IssueCode.DUPLICATE_LABEL,
                        f"duplicate outcome label '{outcome.label}'",
                        event.label,
                    )
                )
            seen.add(outcome.label)
        return issues

    def _validate_positivity(self, event: Event) -> list[ValidationIssue]:
        """Probabilities and prices must be strictly positive and finite."""
        issues = []
        for outcome in event.outcomes:
            if not (math.isfinite(outcome.p) and outcome.p > 0.0):
                issues.append(
                    ValidationIssue(
                        Severity.ERROR,
                        IssueCode.NONPOSITIVE_PROBABILITY,
                        f"outcome '{outcome.label}' has non-positive or non-finite "
                        f"probability {outcome.p!r}",
                        event.label,
                    )
                )
            if not (math.isfinite(outcome.price) and outcome.price > 0.0):
                issues.append(
                    ValidationIssue(
                        Severity.ERROR,
                        IssueCode.NONPOSITIVE_PRICE,
                        f"outcome '{outcome.label}' has non-positive or non-finite "
                        f"price {outcome.price!r}",
                        event.label,
                    )
                )
        return issues

    def _validate_probability_sum(self, event: Event) -> list[ValidationIssue]:
        """Probabilities must sum to one within the configured tolerance."""
        total = math.fsum(event.probabilities)
        if abs(total - 1.0) > self._settings.probability_tol:
            return [
                ValidationIssue(
                    Severity.ERROR,
                    IssueCode.PROBABILITY_SUM,
                    f"probabilities sum to {total:.12g}",
                    event.label,
                )
            ]
        return []

    def _validate_overround(
        self, event: Event, policy: OverroundPolicy
    ) -> list[ValidationIssue]:
        """Strict overround rules out the fair-event cash-shift degeneracy."""
        price_sum = math.fsum(event.prices)
        if price_sum > 1.0:
            return []

        severity = (
            Severity.ERROR
            if policy == OverroundPolicy.REQUIRE_STRICT
            else Severity.WARNING
        )
        return [
            ValidationIssue(
                severity,
                IssueCode.OVERROUND,
                f"fair-event cash-shift degeneracy risk: prices sum to {price_sum:.12g}",
                event.label,
            )
        ]


def validate_market(
    market: Market, settings: SolverSettings | None = None
) -> ValidationReport:
    """Validate a market with a fresh validator."""
    return MarketValidator(settings=settings).validate(market)
