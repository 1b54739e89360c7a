"""Command-line interface for the wagering solvers."""

from packages.cli.app import CliConfig, main

__all__ = ["CliConfig", "main"]
