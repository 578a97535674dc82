"""Exception types shared across the package."""

from __future__ import annotations


class FlagMapError(Exception):
    """Base class for all package errors."""


class ParseError(FlagMapError):
    """A text file could not be parsed."""


class InvalidFlagSystem(FlagMapError):
    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("invalid flag system: " + ", ".join(self.violations))


class PreconditionViolated(FlagMapError):
    """An operation was applied to a map lacking the required structure."""

    def __init__(self, item: str, detail: str = ""):
        self.item = item
        msg = f"precondition {item} violated"
        super().__init__(msg + (f": {detail}" if detail else ""))


class InvalidSeed(FlagMapError):
    pass


class DegenerateAdjacency(FlagMapError):
    pass


class OrderCapExceeded(FlagMapError):
    pass


class MalformedTypeGraph(FlagMapError):
    pass


class LabelingMismatch(FlagMapError):
    pass


class StageInvariantViolated(FlagMapError):
    def __init__(self, stage: str, invariant: str):
        self.stage = stage
        self.invariant = invariant
        super().__init__(f"stage {stage}: {invariant}")
