"""Independent brute-force oracle and solver cross-check."""

from .compare import ComparisonReport, compare
from .solver import (
    BruteForceOracle,
    OracleLimitExceeded,
    OracleNoConvergence,
    OracleSolution,
    oracle_solve,
    project_budget,
)

__all__ = [
    "BruteForceOracle",
    "ComparisonReport",
    "OracleLimitExceeded",
    "OracleNoConvergence",
    "OracleSolution",
    "compare",
    "oracle_solve",
    "project_budget",
]
