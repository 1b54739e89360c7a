"""Exact single-event solver via the scalar multiplier reduction."""

from .solver import (
    BracketFailure,
    BudgetViolation,
    SingleEventSolution,
    SupportInconsistency,
    assemble_single,
    budget_residual_bounded,
    budget_residual_derivative,
    budget_residual_single,
    cash_floor_multiplier,
    solve_lambda_single,
    solve_single,
)

__all__ = [
    "BracketFailure",
    "BudgetViolation",
    "SingleEventSolution",
    "SupportInconsistency",
    "assemble_single",
    "budget_residual_bounded",
    "budget_residual_derivative",
    "budget_residual_single",
    "cash_floor_multiplier",
    "solve_lambda_single",
    "solve_single",
]
