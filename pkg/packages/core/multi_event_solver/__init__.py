"""Exact-expectation solver and diagnostics for simultaneous independent events."""

from .diagnostics import (
    BOUNDARY,
    INTERIOR,
    BoundaryBlock,
    EventDiagnostics,
    KktReport,
    SolveReport,
    continuation_factor,
    kkt_and_identity_report,
)
from .distribution import (
    AtomBudgetExceeded,
    NonpositiveWealth,
    PayoutDistribution,
    convolve,
    convolve_all,
    enumerate_expectation,
    event_payout_distribution,
    expectation,
    expected_marginal,
)
from .expectations import ExpectationEngine
from .solver import FixedSupportSolver, NoConvergence, ReducedProblem, fixed_support_solve

__all__ = [
    "BOUNDARY",
    "INTERIOR",
    "AtomBudgetExceeded",
    "BoundaryBlock",
    "EventDiagnostics",
    "ExpectationEngine",
    "FixedSupportSolver",
    "KktReport",
    "NoConvergence",
    "NonpositiveWealth",
    "PayoutDistribution",
    "ReducedProblem",
    "SolveReport",
    "continuation_factor",
    "convolve",
    "convolve_all",
    "enumerate_expectation",
    "event_payout_distribution",
    "expectation",
    "expected_marginal",
    "fixed_support_solve",
    "kkt_and_identity_report",
]
