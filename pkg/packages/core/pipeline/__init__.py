"""Validate, select, solve and verify in one service."""

from .service import (
    DEGENERACY,
    LIMIT_EXCEEDED,
    NO_CONVERGENCE,
    VALIDATION_ERROR,
    VERIFY_MISMATCH,
    PipelineResult,
    WageringService,
)

__all__ = [
    "DEGENERACY",
    "LIMIT_EXCEEDED",
    "NO_CONVERGENCE",
    "VALIDATION_ERROR",
    "VERIFY_MISMATCH",
    "PipelineResult",
    "WageringService",
]
