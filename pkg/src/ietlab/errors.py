"""Shared exception types; the CLI maps them onto exit codes."""


class HorizonError(ValueError):
    """Requested orbit length exceeds the validity horizon of the data."""


class DegenerateError(ValueError):
    """A construction hit a degeneracy (zero gap, boundary coincidence)."""


class BudgetError(RuntimeError):
    """Requested exact computation exceeds the configured work budget."""


class InvariantError(RuntimeError):
    """A run-time asserted bound failed; runs exit with status 2."""
