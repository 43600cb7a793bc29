"""Enumeration budget shared by the search-heavy operations."""

from __future__ import annotations

import os


class BudgetExceededError(RuntimeError):
    """Raised when an enumeration outgrows the configured node budget."""

    def __init__(self, message: str, partial_count: int = 0):
        super().__init__(message)
        self.partial_count = partial_count


class Budget:
    """A decrementing node counter.  The default limit comes from the
    LAWKIT_BUDGET environment variable."""

    def __init__(self, limit: int | None = None):
        if limit is None:
            limit = int(os.environ.get("LAWKIT_BUDGET", "20000000"))
        self.limit = limit
        self.used = 0

    def spend(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExceededError(
                f"enumeration budget of {self.limit} nodes exhausted", self.used
            )
