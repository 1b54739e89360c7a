"""Solver configuration settings."""

from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Find project root (where .env file lives)
_PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent  # core -> packages -> root
_ENV_FILE = _PROJECT_ROOT / ".env"


class SolverSettings(BaseSettings):
    """Tolerances, limits and parallelism for the wagering solvers."""

    # Parallelism
    threads: int = Field(
        default=1,
        ge=1,
        description="Cap on worker threads for per-event convolutions",
    )

    # Exact expectation engine
    max_atoms: int = Field(
        default=10_000_000,
        ge=1,
        description="Largest payout distribution allowed; exceeding it is an error",
    )

    # Input validation
    probability_tol: float = Field(
        default=1e-12,
        gt=0.0,
        description="Absolute tolerance on each event's probability sum",
    )

    # Fixed-support solver
    max_iters: int = Field(default=500, ge=1, description="Newton iteration cap")
    stationarity_tol: float = Field(
        default=1e-10,
        gt=0.0,
        description="Convergence target, relative to max(1, lambda)",
    )
    boundary_cash_tol: float = Field(
        default=1e-10,
        ge=0.0,
        description="Cash below this switches the solver to the c = 0 regime",
    )
    single_boundary_cash: float = Field(
        default=1e-12,
        ge=0.0,
        description="Single-event cash at or below this is flagged BoundaryCash",
    )
    hessian_cond_limit: float = Field(
        default=1e12,
        gt=1.0,
        description="Condition estimate above which Newton falls back to gradient steps",
    )

    # Diagnostics
    identity_tol: float = Field(default=1e-8, gt=0.0)
    reduced_cost_tol: float = Field(default=1e-9, ge=0.0)

    # Oracle
    oracle_max_states: int = Field(default=1_000_000, ge=1)
    oracle_max_iters: int = Field(default=20_000, ge=1)
    oracle_pg_tol: float = Field(default=1e-9, gt=0.0)
    oracle_seeds: tuple[int, ...] = Field(
        default=(11, 23, 37, 41),
        description="Seeds for the pseudo-random feasible oracle starts",
    )
    activity_eps: float = Field(
        default=1e-7,
        gt=0.0,
        description="Wagers at or below this count as inactive in support extraction",
    )
    verify_objective_tol: float = Field(default=1e-9, gt=0.0)

    model_config = SettingsConfigDict(
        env_prefix="KELLY_SUPPORT_",
        env_file=str(_ENV_FILE) if _ENV_FILE.exists() else ".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


@lru_cache
def get_settings() -> SolverSettings:
    """Get cached solver settings."""
    return SolverSettings()
