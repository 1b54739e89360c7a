"""Top-level packages namespace for the wagering solvers."""
