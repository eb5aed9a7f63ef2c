"""Closed-form overlap probabilities for two independent recurring events.

Every estimator takes a :class:`~eventoverlap.domain.Scenario`, normalizes it
(longer event first), short-circuits the guarded feasibility classes and
returns a :class:`ProbabilityResult`.

Powers are evaluated in log space.  The no-overlap ratio

    (X - S_A - S_B)^(n_A + n_B) / ((X - S_A)^n_A (X - S_B)^n_B)

with ``S = t * n`` is rewritten as

    (1 - S_B / (X - S_A))^n_A * (1 - S_A / (X - S_B))^n_B

so that ``log1p`` keeps full precision when the busy time is small compared
to the window, and the overlap probability is ``-expm1(log ratio)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Literal

from .domain import (
    DomainError,
    FeasibilityClass,
    Scenario,
    ValidationError,
    classify,
    guard_value,
    normalize,
)


class BoundUnavailable(ArithmeticError):
    """The error-bound expression is undefined for this scenario (alpha_B <= 0)."""


class Method(str, enum.Enum):
    PRECISE = "PRECISE"
    APPROX = "APPROX"
    UNIVERSAL = "UNIVERSAL"
    RATE = "RATE"


@dataclass(frozen=True)
class ProbabilityResult:
    value: float
    raw_value: float
    method: Method
    error_bound: float | None = None
    guard: FeasibilityClass | None = None
    clamped: bool = False
    swapped: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"probability {self.value!r} outside [0, 1]")
        if self.error_bound is not None and self.error_bound < 0:
            raise ValueError(f"negative error bound {self.error_bound!r}")


@dataclass(frozen=True)
class DerivedQuantities:
    t_plus: float
    alpha_a: float
    alpha_b: float
    tau: float


def _derived(T: float, t_a: float, t_b: float, n_a: float, n_b: float) -> DerivedQuantities:
    alpha_a = T + t_a - t_a * n_a - t_b * n_b
    return DerivedQuantities(
        t_plus=T + (t_a + t_b) / 2,
        alpha_a=alpha_a,
        alpha_b=alpha_a - (t_a - t_b) / 2,
        tau=max(t_a * n_a, t_b * n_b),
    )


def derived_quantities(s: Scenario) -> DerivedQuantities:
    """Extended window, the two alpha terms and the larger busy time."""
    return _derived(*normalize(s).params())


def _finish(raw: float, method: Method, **kwargs) -> ProbabilityResult:
    value = min(max(raw, 0.0), 1.0)
    clamped = kwargs.pop("clamped", False) or value != raw
    return ProbabilityResult(value=value, raw_value=raw, method=method, clamped=clamped, **kwargs)


def _guarded(cls: FeasibilityClass, method: Method, swapped: bool) -> ProbabilityResult:
    v = guard_value(cls)
    return ProbabilityResult(value=v, raw_value=v, method=method, guard=cls, swapped=swapped)


def log_no_overlap_ratio(window: float, t_a: float, t_b: float, n_a: float, n_b: float) -> float:
    """Log of the no-overlap ratio for a window of length ``window``.

    Counts may be real.  Requires ``window > t_a*n_a + t_b*n_b``.
    """
    busy_a, busy_b = t_a * n_a, t_b * n_b
    if window - busy_a - busy_b <= 0:
        raise DomainError("no arrangement without overlap fits in the window")
    out = 0.0
    if n_a:
        out += n_a * math.log1p(-busy_b / (window - busy_a))
    if n_b:
        out += n_b * math.log1p(-busy_a / (window - busy_b))
    return out


def p_star(s: Scenario) -> ProbabilityResult:
    """Exact overlap probability when each event occurs once."""
    s = normalize(s)
    T, t_a, t_b, n_a, n_b = s.params()
    if n_a != 1 or n_b != 1:
        raise DomainError(f"the single-occurrence formula needs n_a = n_b = 1, got {n_a}, {n_b}")
    cls = classify(s)
    if cls is not FeasibilityClass.NORMAL:
        return _guarded(cls, Method.PRECISE, s.swapped)
    raw = (t_a + t_b) / T - (t_a * t_a + t_b * t_b) / (2 * T * T)
    return _finish(raw, Method.PRECISE, swapped=s.swapped)


def p_approx(s: Scenario) -> ProbabilityResult:
    """First-order approximation ``1 - (1 - n_A (t_A + t_B) / T)^n_B``.

    Past the validity boundary (``n_A (t_A + t_B) >= T``) the value is 1 and
    ``clamped`` is set, even where the raw formula happens to land in [0, 1].
    """
    s = normalize(s)
    T, t_a, t_b, n_a, n_b = s.params()
    cls = classify(s)
    if cls is not FeasibilityClass.NORMAL:
        return _guarded(cls, Method.APPROX, s.swapped)
    base = 1.0 - n_a * (t_a + t_b) / T
    if base <= 0:
        return ProbabilityResult(
            value=1.0, raw_value=1.0 - base**n_b, method=Method.APPROX, clamped=True, swapped=s.swapped
        )
    raw = -math.expm1(n_b * math.log(base))
    return _finish(raw, Method.APPROX, swapped=s.swapped)


ErrorScale = Literal["overlap", "no_overlap"]


def _error_bound(
    T: float, t_a: float, t_b: float, n_a: float, n_b: float, log_pbar: float, scale: ErrorScale
) -> float:
    d = _derived(T, t_a, t_b, n_a, n_b)
    if d.alpha_b <= 0:
        raise BoundUnavailable(f"alpha_b = {d.alpha_b!r} <= 0")
    # alpha_a (alpha_b + tau) / (alpha_b (alpha_a + tau)) == 1 + tau (alpha_a - alpha_b) / (alpha_b (alpha_a + tau))
    excess = d.tau * (d.alpha_a - d.alpha_b) / (d.alpha_b * (d.alpha_a + d.tau))
    growth = math.expm1((n_a + n_b) * math.log1p(excess))
    if scale == "overlap":
        prefactor = -math.expm1(log_pbar)
    elif scale == "no_overlap":
        prefactor = math.exp(log_pbar)
    else:
        raise ValueError(f"unknown error scale {scale!r}")
    return prefactor * growth


def error_bound(s: Scenario, scale: ErrorScale = "overlap") -> float:
    """Upper bound on the error of the universal equation.

    The bound is ``prefactor * (ratio**(n_A + n_B) - 1)``.  With
    ``scale="overlap"`` the prefactor is the overlap probability itself,
    which reproduces the published worked numbers (85.46% +- 1.77%).  With
    ``scale="no_overlap"`` it is the no-overlap probability, the tighter
    form that follows from bounding the no-overlap ratio directly.

    Raises BoundUnavailable when alpha_B <= 0; callers should fall back to
    simulation.  Exactly 0 when both durations are equal.
    """
    s = normalize(s)
    if classify(s) is not FeasibilityClass.NORMAL:
        raise DomainError("error bound is only defined for NORMAL scenarios")
    T, t_a, t_b, n_a, n_b = s.params()
    d = _derived(T, t_a, t_b, n_a, n_b)
    # alpha_b == t_plus - t_a*n_a - t_b*n_b, so this also covers an empty no-overlap set
    if d.alpha_b <= 0:
        raise BoundUnavailable(f"alpha_b = {d.alpha_b!r} <= 0")
    log_pbar = log_no_overlap_ratio(d.t_plus, t_a, t_b, n_a, n_b)
    return _error_bound(T, t_a, t_b, n_a, n_b, log_pbar, scale)


def _universal(
    T: float, t_a: float, t_b: float, n_a: float, n_b: float, method: Method, swapped: bool, scale: ErrorScale
) -> ProbabilityResult:
    t_plus = T + (t_a + t_b) / 2
    if t_plus - t_a * n_a - t_b * n_b <= 0:
        return _guarded(FeasibilityClass.CERTAIN_OVERLAP, method, swapped)
    log_pbar = log_no_overlap_ratio(t_plus, t_a, t_b, n_a, n_b)
    try:
        bound = _error_bound(T, t_a, t_b, n_a, n_b, log_pbar, scale)
    except BoundUnavailable:
        bound = None
    return _finish(-math.expm1(log_pbar), method, error_bound=bound, swapped=swapped)


def p_universal(s: Scenario, scale: ErrorScale = "overlap") -> ProbabilityResult:
    """Universal equation for any counts, with the end-overhang extension of the window."""
    s = normalize(s)
    cls = classify(s)
    if cls is not FeasibilityClass.NORMAL:
        return _guarded(cls, Method.UNIVERSAL, s.swapped)
    return _universal(*s.params(), Method.UNIVERSAL, s.swapped, scale)


def p_universal_rate(
    T: float, t_a: float, t_b: float, rho_a: float, rho_b: float, scale: ErrorScale = "overlap"
) -> ProbabilityResult:
    """Universal equation with expected counts ``n = rho * T`` (not rounded)."""
    for name, v in (("T", T), ("t_a", t_a), ("t_b", t_b)):
        if not math.isfinite(v) or v <= 0:
            raise ValidationError(f"{name} must be a finite positive number, got {v!r}")
    for name, v in (("rho_a", rho_a), ("rho_b", rho_b)):
        if not math.isfinite(v) or v < 0:
            raise ValidationError(f"{name} must be a finite nonnegative rate, got {v!r}")
    swapped = t_a < t_b
    if swapped:
        t_a, t_b, rho_a, rho_b = t_b, t_a, rho_b, rho_a
    n_a, n_b = rho_a * T, rho_b * T
    if n_a == 0 or n_b == 0:
        return _guarded(FeasibilityClass.NO_EVENT, Method.RATE, swapped)
    if T <= t_a * n_a or T <= t_b * n_b:
        return _guarded(FeasibilityClass.CERTAIN_OVERLAP, Method.RATE, swapped)
    return _universal(T, t_a, t_b, n_a, n_b, Method.RATE, swapped, scale)
