"""Deterministic report rendering for supports, solves and cross-checks."""

from packages.core.explainability.builder import (
    ReportBuilder,
    SolveExplanation,
    to_json,
)

__all__ = [
    "ReportBuilder",
    "SolveExplanation",
    "to_json",
]
