"""
Report builder for wagering solves.

Turns support families, solve reports, oracle solutions and
comparisons into plain dicts with a fixed field order, plus a short
natural-language summary. Both the JSON and the table output are
rendered from these dicts, so they always carry the same numbers.

This module is deterministic and does NOT solve anything.
"""

import json
import math
from dataclasses import dataclass, field

from packages.core.market_model.models import Market
from packages.core.multi_event_solver.diagnostics import SolveReport
from packages.core.oracle.compare import ComparisonReport
from packages.core.oracle.solver import OracleSolution
from packages.core.support_selector.selector import SupportFamily


def to_json(payload) -> str:
    """
    Serialize a report dict.

    Floats use the shortest round-trip representation; inf and nan
    become null so the output stays valid JSON.
    """
    return json.dumps(_finite(payload), indent=2, ensure_ascii=False, allow_nan=False)


def _finite(value):
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _finite(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


@dataclass
class SolveExplanation:
    """Sentence-level summary of a solve."""

    utility: str
    bets: list[str] = field(default_factory=list)
    cash: float = 1.0
    lam: float = 1.0
    regime: str = "interior"
    nu: float | None = None

    def to_natural_language(self) -> str:
        parts = [f"Under {self.utility} utility"]
        if self.bets:
            parts.append(f"stake {', '.join(self.bets)}")
        else:
            parts.append("stake nothing")
        parts.append(f"and keep {self.cash:.6g} in cash")
        text = " ".join(parts) + f"; the budget multiplier is {self.lam:.6g}"
        if self.regime == "boundary":
            text += f" with cash at its bound (slack nu = {self.nu:.3g})"
        return text + "."


class ReportBuilder:
    """Builds report dicts from solver objects."""

    def __init__(self, market: Market):
        self._market = market

    def _outcome_label(self, event_index: int, outcome_index: int) -> str:
        return self._market.events[event_index].outcomes[outcome_index].label

    def _pair_list(self, pairs: frozenset[tuple[int, int]]) -> list[dict]:
        return [
            {"event": self._market.events[l].label, "outcome": self._outcome_label(l, i)}
            for l, i in sorted(pairs)
        ]

    # -------------------------
    # Support
    # -------------------------

    def support_dict(self, family: SupportFamily) -> dict:
        events = []
        for event, support in zip(self._market.events, family.events):
            active = set(support.active)
            events.append(
                {
                    "label": event.label,
                    "k": support.k,
                    "P": support.state.P,
                    "Q": support.state.Q,
                    "threshold": support.threshold,
                    "margin": support.margin,
                    "outcomes": [
                        {
                            "outcome": event.outcomes[i].label,
                            "p": event.outcomes[i].p,
                            "price": event.outcomes[i].price,
                            "edge_ratio": ratio,
                            "active": i in active,
                        }
                        for i, ratio in zip(support.order, support.ratios)
                    ],
                }
            )
        return {"events": events}

    # -------------------------
    # Solve
    # -------------------------

    def solve_dict(self, report: SolveReport, utility_label: str | None = None) -> dict:
        """SolveReport in the fixed output schema, wagers in original outcome order."""
        wagers = [
            {"event": event.label, "outcome": outcome.label, "g": g}
            for event, event_wagers in zip(self._market.events, report.portfolio.wagers)
            for outcome, g in zip(event.outcomes, event_wagers)
        ]
        events = [
            {
                "label": block.label,
                "k": block.k,
                "P": block.P,
                "Q": block.Q,
                "threshold": block.threshold,
                "K": block.K,
                "identity_residual": block.identity_residual,
                "reduced_cost_margins": [
                    {"outcome": self._outcome_label(l, j), "margin": margin}
                    for j, margin in block.reduced_cost_margins
                ],
                "lambda_over_K": block.lam_over_K,
                "margin": block.margin,
                "conditioning_residual": block.conditioning_residual,
                "stationarity_residuals": [
                    {"outcome": self._outcome_label(l, i), "residual": r}
                    for i, r in block.stationarity_residuals
                ],
                "corrected_threshold": block.corrected_threshold,
            }
            for l, block in enumerate(report.events)
        ]
        payload = {
            "cash": report.cash,
            "wagers": wagers,
            "lambda": report.lam,
            "events": events,
            "boundary": {"active": report.boundary.active, "nu": report.boundary.nu},
            "support": [
                {
                    "event": s.label,
                    "k": s.k,
                    "active": [self._market.events[l].outcomes[i].label for i in s.active],
                }
                for l, s in enumerate(report.support.events)
            ],
            "objective": report.objective,
            "expected_marginal": report.kkt.expected_marginal,
            "regime": report.regime,
            "iterations": report.iterations,
            "converged": report.converged,
            "oracle_recommended": report.oracle_recommended,
        }
        if utility_label is not None:
            payload["utility"] = utility_label
        return payload

    def explain(self, report: SolveReport, utility_label: str) -> SolveExplanation:
        bets = [
            f"{g:.6g} on {self._market.events[l].label}:{self._outcome_label(l, i)}"
            for l, i in sorted(report.portfolio.positive_wagers())
            for g in (report.portfolio.wagers[l][i],)
        ]
        return SolveExplanation(
            utility=utility_label,
            bets=bets,
            cash=report.cash,
            lam=report.lam,
            regime=report.regime,
            nu=report.boundary.nu,
        )

    def to_natural_language(self, report: SolveReport, utility_label: str) -> str:
        return self.explain(report, utility_label).to_natural_language()

    # -------------------------
    # Oracle
    # -------------------------

    def oracle_dict(self, solution: OracleSolution) -> dict:
        wagers = [
            {"event": event.label, "outcome": outcome.label, "g": g}
            for event, event_wagers in zip(self._market.events, solution.portfolio.wagers)
            for outcome, g in zip(event.outcomes, event_wagers)
        ]
        return {
            "cash": solution.portfolio.cash,
            "wagers": wagers,
            "objective": solution.objective,
            "lambda": solution.lam,
            "expected_marginal": solution.expected_marginal,
            "support": self._pair_list(solution.support),
            "support_is_prefix": solution.support_is_prefix,
            "ambiguity_gap": solution.ambiguity_gap,
            "start": solution.start,
            "iterations": solution.iterations,
            "pg_norm": solution.pg_norm,
            "converged": solution.converged,
        }

    def comparison_dict(self, comparison: ComparisonReport) -> dict:
        return {
            "passed": comparison.passed,
            "support_equal": comparison.support_equal,
            "max_wager_deviation": comparison.max_wager_deviation,
            "objective_gap": comparison.objective_gap,
            "multiplier_gap": comparison.multiplier_gap,
            "solver_support": self._pair_list(comparison.solver_support),
            "oracle_support": self._pair_list(comparison.oracle_support),
        }
