"""
Single-event solver.

With one event and a known active prefix, every active wealth and the
cash position are closed-form functions of the budget multiplier:

    W_i = (U')^{-1}(lambda / r_i),   c = (U')^{-1}(lambda (1 - Q) / (1 - P))

so the whole problem collapses to one strictly decreasing scalar
equation in lambda (the budget). Log utility solves it at lambda = 1
exactly; other utilities bracket geometrically, bisect and polish
with Newton.

When U'(0) is finite (neg_exp) the cash formula reaches zero at
lambda = U'(0) (1 - P) / (1 - Q). Past that multiplier cash stays at
its bound, the budget is spent on the active wealths alone and the
cash constraint carries the slack nu = lambda (1 - Q) - (1 - P) U'(0).
"""

import logging
import math
from dataclasses import dataclass

from scipy.optimize import bisect

from packages.core.config import SolverSettings, get_settings
from packages.core.market_model.models import Event, Portfolio
from packages.core.market_model.ordering import edge_ratio, sort_event
from packages.core.market_model.utility import UtilityDomainError, UtilitySpec
from packages.core.support_selector.selector import (
    DegenerateDenominator,
    PrefixState,
    single_event_support,
)

logger = logging.getLogger(__name__)

_RESIDUAL_TARGET = 1e-13
_BUDGET_TOL = 1e-12
_BISECTION_WIDTH = 1e-8  # relative bracket width handed to Newton
_MAX_NEWTON_STEPS = 10
_MAX_DOUBLINGS = 200


# -----------------------------
# Errors
# -----------------------------


class BracketFailure(Exception):
    """Raised when no sign change of the budget residual can be bracketed."""

    pass


class SupportInconsistency(Exception):
    """Raised when a support that should be optimal yields a nonpositive active wager."""

    pass


class BudgetViolation(Exception):
    """Raised when an assembled portfolio misses the budget by more than 1e-12."""

    pass


# -----------------------------
# Result
# -----------------------------


@dataclass(frozen=True)
class SingleEventSolution:
    """Exact single-event optimum on a fixed prefix."""

    event: str
    lam: float
    cash: float
    order: tuple[int, ...]  # sorted position -> original outcome index
    state: PrefixState
    active_wealths: tuple[float, ...]  # sorted order, length k
    wagers: tuple[float, ...]  # original outcome order
    boundary_cash: bool
    nu: float | None = None  # cash-bound slack, set when cash sits at zero

    def to_portfolio(self) -> Portfolio:
        return Portfolio(cash=self.cash, wagers=(self.wagers,))


# -----------------------------
# Budget equation
# -----------------------------


def _active_terms(event: Event, support: PrefixState) -> list[tuple[float, float]]:
    """(price, edge ratio) of each active outcome, best first."""
    order = sort_event(event)
    return [
        (event.outcomes[i].price, edge_ratio(event.outcomes[i]))
        for i in order[: support.k]
    ]


def _check_masses(support: PrefixState) -> None:
    if support.Q >= 1.0:
        raise DegenerateDenominator(support.Q)
    if support.P >= 1.0:
        raise SupportInconsistency(
            "every outcome is active (P = 1); cash sits at its bound and the "
            "single-event reduction does not apply"
        )


def _cash_scale(support: PrefixState) -> float:
    return (1.0 - support.Q) / (1.0 - support.P)


def budget_residual_single(
    lam: float,
    event: Event,
    support: PrefixState,
    utility: UtilitySpec,
) -> float:
    """
    Budget left side minus one at multiplier lam.

    Strictly decreasing in lam.

    Raises:
        UtilityDomainError: If lam pushes an argument outside the range of U'.
    """
    _check_masses(support)
    terms = [(1.0 - support.Q) * float(utility.marginal_inverse(lam * _cash_scale(support)))]
    terms.extend(
        price * float(utility.marginal_inverse(lam / ratio))
        for price, ratio in _active_terms(event, support)
    )
    terms.append(-1.0)
    return math.fsum(terms)


def budget_residual_derivative(
    lam: float,
    event: Event,
    support: PrefixState,
    utility: UtilitySpec,
) -> float:
    """d/d lam of budget_residual_single (negative everywhere)."""
    _check_masses(support)
    cash_scale = _cash_scale(support)
    terms = [
        (1.0 - support.Q)
        * cash_scale
        * float(utility.marginal_inverse_derivative(lam * cash_scale))
    ]
    terms.extend(
        price * float(utility.marginal_inverse_derivative(lam / ratio)) / ratio
        for price, ratio in _active_terms(event, support)
    )
    return math.fsum(terms)


def _floored_inverse(utility: UtilitySpec, y: float) -> float:
    """(U')^{-1}(y), held at zero wealth once y reaches U'(0)."""
    if y >= utility.marginal_at_zero:
        return 0.0
    return float(utility.marginal_inverse(y))


def _floored_inverse_derivative(utility: UtilitySpec, y: float) -> float:
    if y >= utility.marginal_at_zero:
        return 0.0
    return float(utility.marginal_inverse_derivative(y))


def cash_floor_multiplier(support: PrefixState, utility: UtilitySpec) -> float:
    """Multiplier at which the cash formula reaches zero; inf when U'(0+) is unbounded."""
    _check_masses(support)
    return utility.marginal_at_zero / _cash_scale(support)


def budget_residual_bounded(
    lam: float,
    event: Event,
    support: PrefixState,
    utility: UtilitySpec,
) -> float:
    """
    Budget residual with cash and wealths floored at zero.

    Equals budget_residual_single below cash_floor_multiplier. Above it
    the cash term vanishes and the residual keeps decreasing through the
    active wealths alone, so the function is continuous and nonincreasing
    for every admissible utility.
    """
    _check_masses(support)
    terms = [(1.0 - support.Q) * _floored_inverse(utility, lam * _cash_scale(support))]
    terms.extend(
        price * _floored_inverse(utility, lam / ratio)
        for price, ratio in _active_terms(event, support)
    )
    terms.append(-1.0)
    return math.fsum(terms)


def _bounded_derivative(
    lam: float,
    event: Event,
    support: PrefixState,
    utility: UtilitySpec,
) -> float:
    cash_scale = _cash_scale(support)
    terms = [
        (1.0 - support.Q)
        * cash_scale
        * _floored_inverse_derivative(utility, lam * cash_scale)
    ]
    terms.extend(
        price * _floored_inverse_derivative(utility, lam / ratio) / ratio
        for price, ratio in _active_terms(event, support)
    )
    return math.fsum(terms)


# -----------------------------
# Multiplier
# -----------------------------


def solve_lambda_single(
    event: Event,
    support: PrefixState,
    utility: UtilitySpec,
) -> float:
    """
    Root of the single-event budget equation with cash kept nonnegative.

    When the root lies below cash_floor_multiplier it is the root of
    budget_residual_single; otherwise cash sits at zero.

    Raises:
        BracketFailure: If no sign change appears within 200 doublings.
    """
    _check_masses(support)
    if utility.is_log:
        return 1.0

    def signed(lam: float) -> float:
        return budget_residual_bounded(lam, event, support, utility)

    lam0 = float(utility.marginal(1.0))
    lo, hi = _bracket(signed, lam0, event.label)
    if lo == hi:
        return lo

    lam = bisect(signed, lo, hi, xtol=1e-300, rtol=_BISECTION_WIDTH)
    return _newton_polish(lam, lo, hi, event, support, utility)


def _bracket(signed, lam0: float, label: str) -> tuple[float, float]:
    """Grow a bracket geometrically from lam0 until the residual changes sign."""
    r0 = signed(lam0)
    if r0 == 0.0:
        return lam0, lam0

    if r0 > 0.0:
        lo = lam0
        for _ in range(_MAX_DOUBLINGS):
            hi = lo * 2.0
            r = signed(hi)
            if r == 0.0:
                return hi, hi
            if r < 0.0:
                return lo, hi
            lo = hi
    else:
        hi = lam0
        for _ in range(_MAX_DOUBLINGS):
            lo = hi / 2.0
            r = signed(lo)
            if r == 0.0:
                return lo, lo
            if r > 0.0:
                return lo, hi
            hi = lo

    raise BracketFailure(
        f"event '{label}': budget residual kept one sign over {_MAX_DOUBLINGS} doublings"
    )


def _newton_polish(
    lam: float,
    lo: float,
    hi: float,
    event: Event,
    support: PrefixState,
    utility: UtilitySpec,
) -> float:
    """Newton steps kept inside the bracket; returns the best iterate."""
    best = lam
    best_res = abs(budget_residual_bounded(lam, event, support, utility))

    for _ in range(_MAX_NEWTON_STEPS):
        if best_res <= _RESIDUAL_TARGET:
            break
        res = budget_residual_bounded(best, event, support, utility)
        slope = _bounded_derivative(best, event, support, utility)
        if slope == 0.0:
            break
        candidate = best - res / slope
        if not lo <= candidate <= hi:
            break
        cand_res = abs(budget_residual_bounded(candidate, event, support, utility))
        if cand_res >= best_res:
            break
        best, best_res = candidate, cand_res

    if best_res > _RESIDUAL_TARGET:
        logger.warning(
            "Event '%s': lambda polish stopped at residual %.3e", event.label, best_res
        )
    return best


# -----------------------------
# Assembly
# -----------------------------


def assemble_single(
    event: Event,
    support: PrefixState,
    utility: UtilitySpec,
    lam: float,
    settings: SolverSettings | None = None,
) -> SingleEventSolution:
    """
    Cash and wagers from a solved multiplier.

    A multiplier at or past cash_floor_multiplier puts cash at exactly
    zero and reports the slack nu of the cash bound.

    Raises:
        SupportInconsistency: If an active wager comes out nonpositive.
        BudgetViolation: If cash plus stakes misses 1 by more than 1e-12.
    """
    settings = settings or get_settings()
    _check_masses(support)
    order = sort_event(event)

    cash_argument = lam * _cash_scale(support)
    at_floor = cash_argument >= utility.marginal_at_zero
    try:
        cash = 0.0 if at_floor else float(utility.marginal_inverse(cash_argument))
        wealths = tuple(
            float(utility.marginal_inverse(lam / edge_ratio(event.outcomes[i])))
            for i in order[: support.k]
        )
    except UtilityDomainError as e:
        raise SupportInconsistency(
            f"event '{event.label}': an active outcome has no positive wealth at "
            f"lambda={lam!r} ({e})"
        ) from e

    wagers = [0.0] * event.size
    for i, wealth in zip(order, wealths):
        g = wealth - cash
        if not g > 0.0:
            raise SupportInconsistency(
                f"event '{event.label}': active outcome '{event.outcomes[i].label}' "
                f"gets wager {g!r} <= 0"
            )
        wagers[i] = g

    budget = math.fsum([cash] + [o.price * g for o, g in zip(event.outcomes, wagers)])
    if abs(budget - 1.0) > _BUDGET_TOL:
        raise BudgetViolation(
            f"event '{event.label}': cash plus stakes is {budget!r} at lambda={lam!r}"
        )

    nu = None
    if at_floor:
        nu = lam * (1.0 - support.Q) - (1.0 - support.P) * utility.marginal_at_zero
        logger.warning(
            "Event '%s': cash is at its bound under %s (nu=%.3e)",
            event.label,
            utility.label,
            nu,
        )
    boundary = at_floor or cash <= settings.single_boundary_cash
    if boundary and not at_floor:
        logger.warning(
            "Event '%s': cash %.3e is at the boundary; interior identity not meaningful",
            event.label,
            cash,
        )

    return SingleEventSolution(
        event=event.label,
        lam=lam,
        cash=cash,
        order=order,
        state=support,
        active_wealths=wealths,
        wagers=tuple(wagers),
        boundary_cash=boundary,
        nu=nu,
    )


def solve_single(
    event: Event,
    utility: UtilitySpec,
    settings: SolverSettings | None = None,
) -> SingleEventSolution:
    """Support selection, multiplier and assembly for one event."""
    _, support = single_event_support(event)
    lam = solve_lambda_single(event, support, utility)
    solution = assemble_single(event, support, utility, lam, settings=settings)
    logger.info(
        "Event '%s' solved under %s: k=%d lambda=%.17g cash=%.17g",
        event.label,
        utility.label,
        support.k,
        lam,
        solution.cash,
    )
    return solution
