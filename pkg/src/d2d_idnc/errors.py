"""Exception types raised across the package."""

from __future__ import annotations


class InvalidSpecError(ValueError):
    """A generator or input specification is malformed."""


class FeasibilityError(ValueError):
    """A vertex set or transmission plan breaks a feasibility rule.

    ``violations`` holds whatever evidence the raiser has: conflicting
    vertex pairs for graph checks, rule tags for plan checks.
    """

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = tuple(violations)


class CapacityError(RuntimeError):
    """An exact solver was asked to handle an instance above its ceiling."""

    def __init__(self, message: str, n_vertices: int | None = None, limit: int | None = None):
        super().__init__(message)
        self.n_vertices = n_vertices
        self.limit = limit
