"""Continuous-time simulation of two recurring events.

Occurrence starts of one event are drawn uniformly from
``{0 <= x_1 < ... < x_n < T, x_{i+1} - x_i >= t}`` by drawing ``n`` sorted
uniforms on ``[0, T - (n-1) t)`` and shifting the i-th one by ``(i-1) t``.
Occurrences may run past ``T``.  Intervals are half-open, so two occurrences
that merely touch do not overlap.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
from scipy import stats

from .domain import DomainError, FeasibilityClass, Scenario, classify, normalize

DEFAULT_CHUNK_SIZE = 1 << 16
_Z95 = NormalDist().inv_cdf(0.975)


@dataclass(frozen=True)
class PlacementSample:
    starts: tuple[float, ...]
    duration: float

    def is_valid(self, total_time: float) -> bool:
        xs = self.starts
        if any(not 0 <= x < total_time for x in xs):
            return False
        return all(b - a >= self.duration for a, b in zip(xs, xs[1:]))


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    hits: int
    estimate: float
    std_error: float
    ci_low: float
    ci_high: float
    seed: int
    chunk_size: int
    ci_method: str


def _check_placeable(total_time: float, duration: float, count: int) -> None:
    if count < 0:
        raise DomainError(f"count must be >= 0, got {count}")
    if count and total_time <= (count - 1) * duration:
        raise DomainError(f"{count} occurrences of length {duration} do not fit in {total_time}")


def sample_batch(
    total_time: float, duration: float, count: int, size: int, rng: np.random.Generator
) -> np.ndarray:
    """``size`` independent placements as a ``(size, count)`` array, rows sorted."""
    _check_placeable(total_time, duration, count)
    span = total_time - (count - 1) * duration if count else total_time
    y = rng.uniform(0.0, span, size=(size, count))
    y.sort(axis=1)
    return y + duration * np.arange(count)


def sample_placements(
    total_time: float, duration: float, count: int, rng: np.random.Generator
) -> PlacementSample:
    row = sample_batch(total_time, duration, count, 1, rng)[0]
    return PlacementSample(tuple(float(x) for x in row), float(duration))


def has_overlap(a: PlacementSample, b: PlacementSample) -> bool:
    """Merge-scan the two sorted start lists for an intersecting pair."""
    xs, ta = a.starts, a.duration
    ys, tb = b.starts, b.duration
    i = j = 0
    while i < len(xs) and j < len(ys):
        x, y = xs[i], ys[j]
        if y < x + ta and x < y + tb:
            return True
        if x + ta <= y + tb:
            i += 1
        else:
            j += 1
    return False


def batch_overlap(a: np.ndarray, t_a: float, b: np.ndarray, t_b: float) -> np.ndarray:
    """Row-wise :func:`has_overlap` for sorted start arrays of shape (rows, n_a) and (rows, n_b).

    For each A start, the only B occurrence that can overlap it is the one
    with the latest start before ``x + t_a``.  Rows are shifted apart so a
    single ``searchsorted`` over the flattened B starts finds it.
    """
    rows, n_a = a.shape
    n_b = b.shape[1]
    if n_a == 0 or n_b == 0:
        return np.zeros(rows, dtype=bool)
    stride = 2.0 * (max(a.max(initial=0.0), b.max(initial=0.0)) + t_a + t_b) + 1.0
    offset = stride * np.arange(rows)[:, None]
    flat_b = (b + offset).ravel()
    k = np.searchsorted(flat_b, (a + t_a + offset).ravel(), side="left") - 1
    row_of_a = np.repeat(np.arange(rows), n_a)
    same_row = k >= row_of_a * n_b
    y = b.ravel()[np.maximum(k, 0)]
    hit = same_row & (a.ravel() < y + t_b)
    return hit.reshape(rows, n_a).any(axis=1)


def _chunk_hits(s: Scenario, size: int, seed: int, index: int) -> int:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))
    T, t_a, t_b, n_a, n_b = s.params()
    a = sample_batch(T, t_a, n_a, size, rng)
    b = sample_batch(T, t_b, n_b, size, rng)
    return int(batch_overlap(a, t_a, b, t_b).sum())


def confidence_interval(hits: int, trials: int) -> tuple[float, float, str]:
    """95% interval: normal approximation, Clopper-Pearson when either tail has < 10 outcomes."""
    p = hits / trials
    if hits < 10 or trials - hits < 10:
        lo = 0.0 if hits == 0 else float(stats.beta.ppf(0.025, hits, trials - hits + 1))
        hi = 1.0 if hits == trials else float(stats.beta.ppf(0.975, hits + 1, trials - hits))
        return min(lo, p), max(hi, p), "clopper-pearson"
    half = _Z95 * math.sqrt(p * (1 - p) / trials)
    return max(0.0, p - half), min(1.0, p + half), "normal"


def estimate(
    s: Scenario,
    trials: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 1,
) -> SimulationReport:
    """Monte Carlo overlap probability.

    Trials are split into chunks of ``chunk_size``; chunk ``i`` draws from
    its own stream keyed by ``(seed, i)``, so the report depends only on
    ``(s, trials, seed, chunk_size)`` and not on ``workers``.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if chunk_size < 1:
        raise DomainError(f"chunk_size must be >= 1, got {chunk_size}")
    if seed < 0:
        raise DomainError(f"seed must be >= 0, got {seed}")
    s = normalize(s)
    cls = classify(s)
    if cls is not FeasibilityClass.NORMAL:
        raise DomainError(f"simulation needs a NORMAL scenario, got {cls.value}")
    T, t_a, t_b, n_a, n_b = s.params()
    _check_placeable(T, t_a, n_a)
    _check_placeable(T, t_b, n_b)

    n_chunks = -(-trials // chunk_size)
    sizes = [min(chunk_size, trials - i * chunk_size) for i in range(n_chunks)]
    if workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_chunk = list(pool.map(lambda i: _chunk_hits(s, sizes[i], seed, i), range(n_chunks)))
    else:
        per_chunk = [_chunk_hits(s, sizes[i], seed, i) for i in range(n_chunks)]
    hits = sum(per_chunk)

    p = hits / trials
    lo, hi, how = confidence_interval(hits, trials)
    return SimulationReport(
        trials=trials,
        hits=hits,
        estimate=p,
        std_error=math.sqrt(p * (1 - p) / trials),
        ci_low=lo,
        ci_high=hi,
        seed=seed,
        chunk_size=chunk_size,
        ci_method=how,
    )
