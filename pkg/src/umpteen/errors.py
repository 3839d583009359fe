"""Shared exception types."""

from __future__ import annotations


class BudgetExceededError(RuntimeError):
    """A computation refused to run because it would exceed its configured budget.

    Raised loudly instead of truncating silently; carries the size the
    computation would need so callers can re-run with a larger budget.
    """

    def __init__(self, message: str, *, required: int | None = None, budget: int | None = None):
        super().__init__(message)
        self.required = required
        self.budget = budget
