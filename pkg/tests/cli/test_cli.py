"""
Tests for the kelly_support command line.

Commands run in-process through main(argv); stdout carries the JSON
report, the return value is the exit code.
"""

import json

import pytest

from packages.cli import main
from packages.cli.app import parse_config
from packages.core.config import get_settings
from packages.core.support_selector import SupportSelector
from tests.core.market_factory import DATA_DIR


# -----------------------------
# Fixtures
# -----------------------------


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def run(capsys, *argv: str) -> tuple[int, dict]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def market(name: str) -> str:
    return str(DATA_DIR / f"{name}.json")


# -----------------------------
# Argument Parsing Tests
# -----------------------------


class TestParseConfig:
    def test_defaults(self) -> None:
        config = parse_config(["solve", "--input", market("single_event")])
        assert config.command == "solve"
        assert config.utility == "log"
        assert config.output_format == "json"
        assert config.settings() is get_settings()

    def test_overrides(self) -> None:
        config = parse_config(
            ["solve", "--input", "m.json", "--tol", "1e-8", "--max-atoms", "50"]
        )
        settings = config.settings()
        assert settings.stationarity_tol == 1e-8
        assert settings.max_atoms == 50
        assert get_settings().max_atoms != 50

    def test_missing_input(self) -> None:
        with pytest.raises(SystemExit):
            parse_config(["solve"])


# -----------------------------
# Command Tests
# -----------------------------


class TestCommands:
    def test_support(self, capsys) -> None:
        code, payload = run(capsys, "support", "--input", market("mixed_events"))
        assert code == 0
        assert [e["k"] for e in payload["events"]] == [0, 1, 2]

    def test_solve(self, capsys) -> None:
        code, payload = run(capsys, "solve", "--input", market("single_event"))
        assert code == 0
        assert payload["cash"] == pytest.approx(0.8, abs=1e-15)
        assert payload["wagers"][0]["g"] == pytest.approx(0.4, abs=1e-12)
        assert payload["wagers"][1]["g"] == 0.0
        assert payload["boundary"]["active"] is False

    def test_solve_crra(self, capsys) -> None:
        code, payload = run(
            capsys, "solve", "--input", market("two_events"), "--utility", "crra", "--gamma", "3"
        )
        assert code == 0
        assert payload["converged"] is True
        assert payload["utility"] == "crra(gamma=3)"

    def test_verify(self, capsys) -> None:
        code, payload = run(capsys, "verify", "--input", market("mixed_events"))
        assert code == 0
        assert payload["passed"] is True

    def test_oracle(self, capsys) -> None:
        code, payload = run(capsys, "oracle", "--input", market("all_cash"))
        assert code == 0
        assert payload["support"] == []

    def test_subfair_allowed(self, capsys) -> None:
        code, payload = run(
            capsys, "solve", "--input", market("subfair_full_support"), "--allow-subfair"
        )
        assert code == 0
        assert payload["boundary"]["active"] is True
        assert payload["oracle_recommended"] is True


# -----------------------------
# Table Format Tests
# -----------------------------


def run_table(capsys, *argv: str) -> tuple[dict, str]:
    """JSON payload and table text of the same command."""
    code, payload = run(capsys, *argv)
    assert code == 0
    assert main([*argv, "--format", "table"]) == 0
    return payload, capsys.readouterr().out


def assert_shown(text: str, *values) -> None:
    for value in values:
        if isinstance(value, float):
            assert repr(value) in text, value


class TestTableFormat:
    @pytest.fixture(autouse=True)
    def wide_console(self, monkeypatch):
        monkeypatch.setenv("COLUMNS", "400")

    def test_support(self, capsys) -> None:
        payload, text = run_table(capsys, "support", "--input", market("mixed_events"))
        for event in payload["events"]:
            assert event["label"] in text
            assert_shown(text, event["P"], event["Q"], event["threshold"], event["margin"])
            for row in event["outcomes"]:
                assert row["outcome"] in text
                assert_shown(text, row["p"], row["price"], row["edge_ratio"])

    def test_solve(self, capsys) -> None:
        payload, text = run_table(capsys, "solve", "--input", market("two_events"))
        assert_shown(text, payload["cash"], payload["lambda"], payload["objective"])
        assert_shown(text, payload["boundary"]["nu"])
        assert_shown(text, *(row["g"] for row in payload["wagers"]))
        for event in payload["events"]:
            assert_shown(
                text,
                event["P"],
                event["Q"],
                event["threshold"],
                event["K"],
                event["lambda_over_K"],
                event["identity_residual"],
            )
        assert f"regime={payload['regime']}" in text

    def test_solve_prints_summary_sentence(self, capsys) -> None:
        payload, text = run_table(capsys, "solve", "--input", market("single_event"))
        assert "Under log utility stake " in text
        assert f"and keep {payload['cash']:.6g} in cash" in text
        assert f"the budget multiplier is {payload['lambda']:.6g}." in text

    def test_json_has_no_summary_sentence(self, capsys) -> None:
        main(["solve", "--input", market("single_event")])
        assert "Under log utility" not in capsys.readouterr().out

    def test_verify(self, capsys) -> None:
        payload, text = run_table(capsys, "verify", "--input", market("mixed_events"))
        assert_shown(
            text,
            payload["max_wager_deviation"],
            payload["objective_gap"],
            payload["multiplier_gap"],
        )
        assert "passed" in text

    def test_oracle(self, capsys) -> None:
        payload, text = run_table(capsys, "oracle", "--input", market("two_events"))
        assert_shown(text, payload["cash"], payload["objective"], payload["lambda"])
        assert_shown(text, payload["ambiguity_gap"], payload["pg_norm"])
        assert_shown(text, *(row["g"] for row in payload["wagers"]))


# -----------------------------
# Exit Code Tests
# -----------------------------


class TestExitCodes:
    def test_missing_file(self, capsys, tmp_path) -> None:
        code, payload = run(capsys, "solve", "--input", str(tmp_path / "nope.json"))
        assert code == 2
        assert payload["error_type"] == "validation_error"

    def test_schema_violation(self, capsys, tmp_path) -> None:
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"events": [], "extra": 1}))
        code, _ = run(capsys, "support", "--input", str(path))
        assert code == 2

    def test_crra_needs_gamma(self, capsys) -> None:
        code, _ = run(capsys, "solve", "--input", market("single_event"), "--utility", "crra")
        assert code == 2

    def test_fair_event_is_degeneracy(self, capsys) -> None:
        code, payload = run(capsys, "solve", "--input", market("fair_event"))
        assert code == 3
        assert payload["error_type"] == "degeneracy"

    def test_subfair_rejected_by_default(self, capsys) -> None:
        code, _ = run(capsys, "support", "--input", market("subfair_full_support"))
        assert code == 3

    def test_atom_limit(self, capsys) -> None:
        code, payload = run(
            capsys, "solve", "--input", market("mixed_events"), "--max-atoms", "2"
        )
        assert code == 2
        assert payload["error_type"] == "limit_exceeded"

    def test_no_convergence_prints_diagnostics(self, capsys, monkeypatch) -> None:
        monkeypatch.setenv("KELLY_SUPPORT_MAX_ITERS", "1")
        code, payload = run(
            capsys, "solve", "--input", market("mixed_events"), "--utility", "crra", "--gamma", "3"
        )
        assert code == 4
        assert payload["converged"] is False
        assert "cash" in payload

    def test_corrupted_support_fails_verify(self, capsys, monkeypatch) -> None:
        """Dropping an active outcome of 'race' makes the oracle disagree."""
        original = SupportSelector.select_event

        def drop_last_active(self, event):
            support = original(self, event)
            if event.label == "race" and support.k > 0:
                return self.prefix_support(event, support.k - 1)
            return support

        monkeypatch.setattr(SupportSelector, "select_event", drop_last_active)
        code, payload = run(capsys, "verify", "--input", market("mixed_events"))
        assert code == 5
        assert payload["passed"] is False
        assert payload["support_equal"] is False


# -----------------------------
# Determinism Tests
# -----------------------------


class TestDeterminism:
    @pytest.mark.parametrize("threads", ["1", "4"])
    def test_byte_identical_output(self, capsys, monkeypatch, threads: str) -> None:
        monkeypatch.setenv("KELLY_SUPPORT_THREADS", threads)
        get_settings.cache_clear()
        argv = ["solve", "--input", market("mixed_events"), "--utility", "crra", "--gamma", "2"]

        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        second = capsys.readouterr().out
        assert first == second
        assert get_settings().threads == int(threads)

    def test_threads_do_not_change_output(self, capsys, monkeypatch) -> None:
        argv = ["solve", "--input", market("mixed_events"), "--utility", "neg_exp", "--a", "1"]
        outputs = []
        for threads in ("1", "4"):
            monkeypatch.setenv("KELLY_SUPPORT_THREADS", threads)
            get_settings.cache_clear()
            assert main(argv) == 0
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1]
