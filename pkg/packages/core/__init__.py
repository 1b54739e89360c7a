"""Core domain package: markets, supports, solvers and the oracle."""
