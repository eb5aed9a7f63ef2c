"""Exact arrangement counting on a discrete time grid.

The window is cut into ``t_prime`` unit slots.  An event of grid duration
``d`` occupies ``d`` consecutive slots; all occurrences of one event must be
pairwise disjoint and, for the counting model, lie fully inside the grid.
Two routes compute the same no-overlap probability: a binomial-coefficient
formula and a direct enumeration over slot bitmasks.  Everything is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .closed_form import log_no_overlap_ratio, p_star
from .domain import DomainError, Scenario, ValidationError, normalize

DEFAULT_CAP = 10**8


class DegenerateError(ValueError):
    """One of the events cannot be placed on the grid at all."""


class CapExceeded(RuntimeError):
    """Brute-force enumeration would visit more configurations than allowed."""


@dataclass(frozen=True)
class DiscreteScenario:
    t_prime: int
    dur_a: int
    dur_b: int
    n_a: int
    n_b: int

    def __post_init__(self) -> None:
        for name in ("t_prime", "dur_a", "dur_b", "n_a", "n_b"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ValidationError(f"{name} must be an integer, got {v!r}")
        if self.t_prime < 1 or self.dur_b < 1 or self.n_a < 0 or self.n_b < 0:
            raise ValidationError(f"invalid grid scenario {self}")
        if self.dur_a < self.dur_b:
            raise ValidationError("dur_a must be >= dur_b; use DiscreteScenario.create")

    @classmethod
    def create(cls, t_prime: int, dur_a: int, dur_b: int, n_a: int, n_b: int) -> "DiscreteScenario":
        if dur_a < dur_b:
            dur_a, dur_b, n_a, n_b = dur_b, dur_a, n_b, n_a
        return cls(t_prime, dur_a, dur_b, n_a, n_b)


@dataclass(frozen=True)
class ExactProbability:
    """A probability kept as an exact ratio of (unreduced) arrangement counts."""

    numerator: int
    denominator: int

    def __post_init__(self) -> None:
        if self.denominator <= 0 or not 0 <= self.numerator <= self.denominator:
            raise ValueError(f"not a probability: {self.numerator}/{self.denominator}")

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def complement(self) -> "ExactProbability":
        return ExactProbability(self.denominator - self.numerator, self.denominator)

    def __float__(self) -> float:
        return float(self.value)


def count_placements(t_prime: int, dur: int, n: int) -> int:
    """Ways to put ``n`` disjoint blocks of length ``dur`` fully inside ``t_prime`` slots."""
    if t_prime < 1 or dur < 1 or n < 0:
        raise ValidationError(f"invalid placement request ({t_prime}, {dur}, {n})")
    free = t_prime - (dur - 1) * n
    if free < n:
        return 0
    return math.comb(free, n)


def exact_no_overlap_probability(d: DiscreteScenario) -> ExactProbability:
    total = count_placements(d.t_prime, d.dur_a, d.n_a) * count_placements(d.t_prime, d.dur_b, d.n_b)
    if total == 0:
        raise DegenerateError(f"an event cannot be placed: {d}")
    n = d.n_a + d.n_b
    free = d.t_prime - (d.dur_a - 1) * d.n_a - (d.dur_b - 1) * d.n_b
    disjoint = math.comb(n, d.n_a) * math.comb(free, n) if free >= n else 0
    return ExactProbability(disjoint, total)


def _placement_masks(t_prime: int, dur: int, n: int) -> list[int]:
    block = (1 << dur) - 1
    out: list[int] = []

    def rec(first: int, left: int, mask: int) -> None:
        if left == 0:
            out.append(mask)
            return
        # the remaining blocks need left*dur slots from `first` on
        for x in range(first, t_prime - left * dur + 1):
            rec(x + dur, left - 1, mask | (block << x))

    rec(0, n, 0)
    return out


def brute_force_no_overlap(d: DiscreteScenario, cap: int = DEFAULT_CAP) -> ExactProbability:
    """Enumerate every joint placement and count those with disjoint slot sets."""
    estimate = count_placements(d.t_prime, d.dur_a, d.n_a) * count_placements(d.t_prime, d.dur_b, d.n_b)
    if estimate > cap:
        raise CapExceeded(f"{estimate} configurations exceed the cap of {cap}")
    masks_a = _placement_masks(d.t_prime, d.dur_a, d.n_a)
    masks_b = _placement_masks(d.t_prime, d.dur_b, d.n_b)
    if not masks_a or not masks_b:
        raise DegenerateError(f"an event cannot be placed: {d}")
    disjoint = sum(1 for a in masks_a for b in masks_b if not a & b)
    return ExactProbability(disjoint, len(masks_a) * len(masks_b))


def p_star_grid(t_prime: int, dur_a: int, dur_b: int) -> ExactProbability:
    """Single-occurrence overlap probability with starts anywhere in ``0..t_prime-1``.

    Occurrences may run past the last slot.
    """
    if not (t_prime >= 1 and dur_a >= 1 and dur_b >= 1):
        raise ValidationError(f"invalid grid ({t_prime}, {dur_a}, {dur_b})")
    hits = 0
    for xa in range(t_prime):
        for xb in range(t_prime):
            if xb < xa + dur_a and xa < xb + dur_b:
                hits += 1
    return ExactProbability(hits, t_prime * t_prime)


@dataclass(frozen=True)
class ConvergencePoint:
    delta: Fraction
    exact: Fraction
    closed_form: float
    gap: float


def _to_grid(x: float, k: int) -> int:
    scaled = Fraction(x) * k
    if scaled.denominator != 1:
        raise DomainError(f"{x} is not a multiple of the grid unit 1/{k}")
    return int(scaled)


def discretize(s: Scenario, k: int) -> DiscreteScenario:
    """Grid version of ``s`` with unit ``1/k``."""
    s = normalize(s)
    T, t_a, t_b, n_a, n_b = s.params()
    return DiscreteScenario(_to_grid(T, k), _to_grid(t_a, k), _to_grid(t_b, k), n_a, n_b)


def _refine(s: Scenario, refinements: Sequence[int], oracle: str, cap: int) -> Iterator[ConvergencePoint]:
    s = normalize(s)
    T, t_a, t_b, n_a, n_b = s.params()
    single = n_a == 1 and n_b == 1
    if single:
        limit = p_star(s).value
    else:
        limit = -math.expm1(log_no_overlap_ratio(T, t_a, t_b, n_a, n_b))
    for k in refinements:
        if k < 1:
            raise ValidationError(f"refinement factors must be positive integers, got {k}")
        d = discretize(s, k)
        if single:
            exact = p_star_grid(d.t_prime, d.dur_a, d.dur_b).value
        elif oracle == "brute":
            exact = brute_force_no_overlap(d, cap).complement().value
        else:
            exact = exact_no_overlap_probability(d).complement().value
        yield ConvergencePoint(Fraction(1, k), exact, limit, abs(float(exact) - limit))


def convergence_series(
    s: Scenario, refinements: Sequence[int], oracle: str = "formula", cap: int = DEFAULT_CAP
) -> list[ConvergencePoint]:
    """Discrete overlap probability against its continuum limit as the grid is refined.

    Each refinement ``k`` uses grid unit ``1/k``.  Single-occurrence
    scenarios are compared with the exact single-occurrence formula; other
    scenarios with the no-overlap ratio over the bare window ``T`` (the
    limit of the fully-inside counting model).
    """
    if oracle not in ("formula", "brute"):
        raise ValueError(f"unknown oracle {oracle!r}")
    return list(_refine(s, refinements, oracle, cap))
