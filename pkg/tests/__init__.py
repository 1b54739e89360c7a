"""Wagering solver test suite."""
