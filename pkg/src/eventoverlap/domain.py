"""Scenario types, input validation and feasibility classification."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace


class ValidationError(ValueError):
    """Raised for parameters that violate a type invariant."""


class DomainError(ValueError):
    """Raised when an operation is asked to work outside its domain."""


class FeasibilityClass(str, enum.Enum):
    NO_EVENT = "NO_EVENT"
    CERTAIN_OVERLAP = "CERTAIN_OVERLAP"
    NORMAL = "NORMAL"
    INFEASIBLE_PLACEMENT = "INFEASIBLE_PLACEMENT"


@dataclass(frozen=True)
class EventSpec:
    """A recurring event: each occurrence lasts ``duration``, it happens ``count`` times."""

    duration: float
    count: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.duration) or self.duration <= 0:
            raise ValidationError(f"duration must be a finite positive number, got {self.duration!r}")
        if isinstance(self.count, bool) or int(self.count) != self.count or self.count < 0:
            raise ValidationError(f"count must be a nonnegative integer, got {self.count!r}")
        object.__setattr__(self, "count", int(self.count))

    @property
    def busy_time(self) -> float:
        return self.duration * self.count


@dataclass(frozen=True)
class Scenario:
    total_time: float
    event_a: EventSpec
    event_b: EventSpec
    swapped: bool = False

    def __post_init__(self) -> None:
        if not math.isfinite(self.total_time) or self.total_time <= 0:
            raise ValidationError(f"total_time must be a finite positive number, got {self.total_time!r}")

    @classmethod
    def from_params(cls, T: float, t_a: float, t_b: float, n_a: int, n_b: int) -> "Scenario":
        """Build a raw (not yet normalized) scenario from the five scalar parameters."""
        return cls(float(T), EventSpec(float(t_a), n_a), EventSpec(float(t_b), n_b))

    def params(self) -> tuple[float, float, float, int, int]:
        return (
            self.total_time,
            self.event_a.duration,
            self.event_b.duration,
            self.event_a.count,
            self.event_b.count,
        )

    @property
    def is_normalized(self) -> bool:
        # ties on duration are broken by count so that the order is canonical
        a, b = self.event_a, self.event_b
        return (a.duration, a.count) >= (b.duration, b.count)


def normalize(raw: Scenario) -> Scenario:
    """Return the scenario with the longer-lasting event labelled A.

    Equal durations put the more frequent event first.

    Exchanging the events sets ``swapped``; an already ordered scenario is
    returned as is, so the function is idempotent.
    """
    if raw.is_normalized:
        return raw
    return replace(raw, event_a=raw.event_b, event_b=raw.event_a, swapped=not raw.swapped)


def _ensure_normalized(s: Scenario) -> Scenario:
    return s if s.is_normalized else normalize(s)


def classify(s: Scenario) -> FeasibilityClass:
    s = _ensure_normalized(s)
    T = s.total_time
    a, b = s.event_a, s.event_b
    if a.count == 0 or b.count == 0:
        return FeasibilityClass.NO_EVENT
    if T <= a.busy_time or T <= b.busy_time:
        return FeasibilityClass.CERTAIN_OVERLAP
    # Unreachable while the guard above holds, kept so the classes stay exhaustive.
    if T <= (a.count - 1) * a.duration or T <= (b.count - 1) * b.duration:
        return FeasibilityClass.INFEASIBLE_PLACEMENT
    return FeasibilityClass.NORMAL


def guard_value(cls: FeasibilityClass) -> float | None:
    """Probability forced by a guarded class, or None for NORMAL scenarios."""
    if cls is FeasibilityClass.NO_EVENT:
        return 0.0
    if cls is FeasibilityClass.NORMAL:
        return None
    return 1.0
