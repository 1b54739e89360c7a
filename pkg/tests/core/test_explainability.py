"""
Tests for report dicts and JSON output.
"""

import json
import math

import pytest

from packages.core.explainability import ReportBuilder, SolveExplanation, to_json
from packages.core.market_model import LogUtility
from packages.core.pipeline import WageringService
from tests.core.market_factory import kelly_event, make_event, make_market


# -----------------------------
# Fixtures
# -----------------------------


@pytest.fixture
def market():
    return make_market(
        make_event("race", (0.2, 0.3, 0.5), (0.3, 0.35, 0.4), names=["c", "b", "a"])
    )


@pytest.fixture
def solved(market):
    result = WageringService().solve(market, LogUtility())
    assert result.success
    return result


# -----------------------------
# JSON Tests
# -----------------------------


class TestToJson:
    def test_non_finite_becomes_null(self) -> None:
        text = to_json({"K": math.inf, "nu": math.nan, "k": 1})
        assert json.loads(text) == {"K": None, "nu": None, "k": 1}

    def test_floats_round_trip(self) -> None:
        value = 0.1 + 0.2
        assert json.loads(to_json({"x": value}))["x"] == value

    def test_nested_tuples_become_lists(self) -> None:
        assert json.loads(to_json({"a": ((1.0, math.inf),)})) == {"a": [[1.0, None]]}


# -----------------------------
# Builder Tests
# -----------------------------


class TestReportBuilder:
    def test_support_dict_sorted_order(self, market, solved) -> None:
        payload = ReportBuilder(market).support_dict(solved.family)
        event = payload["events"][0]
        assert event["k"] == 2
        assert [o["outcome"] for o in event["outcomes"]] == ["a", "b", "c"]
        assert [o["active"] for o in event["outcomes"]] == [True, True, False]

    def test_solve_dict_schema(self, market, solved) -> None:
        payload = ReportBuilder(market).solve_dict(solved.report, "log")
        assert list(payload)[:5] == ["cash", "wagers", "lambda", "events", "boundary"]
        assert [w["outcome"] for w in payload["wagers"]] == ["c", "b", "a"]
        assert payload["wagers"][0]["g"] == 0.0
        assert payload["lambda"] == pytest.approx(1.0, rel=1e-12)
        assert payload["boundary"] == {"active": False, "nu": None}
        assert payload["utility"] == "log"

        event = payload["events"][0]
        for key in ("label", "k", "P", "Q", "threshold", "K", "identity_residual"):
            assert key in event
        assert event["reduced_cost_margins"][0]["outcome"] == "c"
        assert event["reduced_cost_margins"][0]["margin"] >= 0.0

    def test_solve_dict_serializes(self, market, solved) -> None:
        text = to_json(ReportBuilder(market).solve_dict(solved.report))
        assert json.loads(text)["cash"] == solved.report.cash
        assert "utility" not in json.loads(text)

    def test_natural_language(self, market, solved) -> None:
        text = ReportBuilder(market).to_natural_language(solved.report, "log")
        assert text.startswith("Under log utility stake")
        assert "race:a" in text
        assert "race:c" not in text
        assert text.endswith(".")

    def test_explanation_without_bets(self) -> None:
        explanation = SolveExplanation(utility="log")
        assert explanation.to_natural_language() == (
            "Under log utility stake nothing and keep 1 in cash; the budget multiplier is 1."
        )

    def test_boundary_explanation(self) -> None:
        explanation = SolveExplanation(utility="log", cash=0.0, regime="boundary", nu=0.1)
        assert "cash at its bound (slack nu = 0.1)" in explanation.to_natural_language()

    def test_comparison_dict(self) -> None:
        market = make_market(kelly_event())
        result = WageringService().verify(market, LogUtility())
        payload = ReportBuilder(market).comparison_dict(result.comparison)
        assert payload["passed"] is True
        assert payload["solver_support"] == [{"event": "e0", "outcome": "o0"}]
        assert payload["oracle_support"] == payload["solver_support"]

    def test_oracle_dict(self) -> None:
        market = make_market(kelly_event())
        result = WageringService().oracle(market, LogUtility())
        payload = ReportBuilder(market).oracle_dict(result.oracle)
        assert payload["support"] == [{"event": "e0", "outcome": "o0"}]
        assert payload["converged"] is True
        assert payload["cash"] == pytest.approx(0.8, abs=1e-7)
