"""Three-way cross-check: closed forms against the grid oracle and simulation."""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Iterator

from . import closed_form, discrete_oracle, monte_carlo
from .domain import Scenario

# Published worked examples: name -> ((T, t_a, t_b, n_a, n_b), method, value, tolerance)
PUBLISHED_EXAMPLES = {
    "precise(60,5,2)": ((60, 5, 2, 1, 1), "precise", 0.1126, 1e-4),
    "precise(3,1,1)": ((3, 1, 1, 1, 1), "precise", 5 / 9, 1e-12),
    "approx(120,3,1,5,10)": ((120, 3, 1, 5, 10), "approx", 0.8385, 1e-4),
    "universal(120,3,1,5,10)": ((120, 3, 1, 5, 10), "universal", 0.8546, 1e-4),
    "universal(3,1,1,1,1)": ((3, 1, 1, 1, 1), "universal", 5 / 9, 1e-12),
}

# NORMAL scenarios with t_a*n_a + t_b*n_b <= T/2, varying all five parameters.
MC_GRID: list[tuple[float, float, float, int, int]] = [
    (120, 3, 1, 5, 10),
    (60, 5, 2, 2, 3),
    (100, 2, 1, 3, 5),
    (200, 4, 4, 5, 5),
    (100, 5, 1, 4, 10),
    (50, 2, 2, 3, 3),
    (80, 6, 1, 1, 3),
    (100, 10, 1, 2, 2),
    (40, 1, 1, 5, 5),
    (300, 3, 2, 10, 20),
    (60, 5, 2, 1, 1),
    (30, 4, 3, 1, 1),
    (100, 8, 2, 3, 3),
]

GRIDS = {
    "small": {"box": (10, 3, 2), "mc": MC_GRID[:6] + MC_GRID[10:12]},
    "full": {"box": (14, 4, 3), "mc": MC_GRID},
}

P_STAR_CONVERGENCE = ((3, 1, 1, 1, 1), (1, 2, 4, 8, 16))
COUNTING_CONVERGENCE = ((12, 3, 2, 2, 2), (1, 2))


@dataclass
class Check:
    name: str
    passed: bool
    details: dict[str, Any] = field(default_factory=dict)


def discrete_box(max_t: int, max_dur: int, max_count: int) -> Iterator[discrete_oracle.DiscreteScenario]:
    """Every placeable grid scenario with ``t_prime <= max_t``, durations and counts bounded."""
    for t_prime in range(1, max_t + 1):
        for dur_a in range(1, max_dur + 1):
            for dur_b in range(1, dur_a + 1):
                for n_a, n_b in itertools.product(range(max_count + 1), repeat=2):
                    if (
                        discrete_oracle.count_placements(t_prime, dur_a, n_a)
                        and discrete_oracle.count_placements(t_prime, dur_b, n_b)
                    ):
                        yield discrete_oracle.DiscreteScenario(t_prime, dur_a, dur_b, n_a, n_b)


def check_published_examples() -> list[Check]:
    fns = {
        "precise": closed_form.p_star,
        "approx": closed_form.p_approx,
        "universal": closed_form.p_universal,
    }
    out = []
    for name, (params, method, expected, tol) in PUBLISHED_EXAMPLES.items():
        got = fns[method](Scenario.from_params(*params)).value
        out.append(Check(f"published_example[{name}]", abs(got - expected) <= tol,
                         {"value": got, "expected": expected, "tolerance": tol}))
    return out


def check_oracle_equivalence(max_t: int, max_dur: int, max_count: int) -> Check:
    cases = 0
    mismatches = []
    for d in discrete_box(max_t, max_dur, max_count):
        cases += 1
        formula = discrete_oracle.exact_no_overlap_probability(d).value
        brute = discrete_oracle.brute_force_no_overlap(d).value
        if formula != brute:
            mismatches.append({"scenario": asdict(d), "formula": str(formula), "brute": str(brute)})
    return Check(
        "oracle_equivalence",
        not mismatches and cases > 0,
        {"box": [max_t, max_dur, max_count], "cases": cases, "mismatches": mismatches[:10]},
    )


def check_convergence() -> list[Check]:
    params, ks = P_STAR_CONVERGENCE
    series = discrete_oracle.convergence_series(Scenario.from_params(*params), ks)
    gaps = [p.gap for p in series]
    ratios = [b / a for a, b in zip(gaps, gaps[1:])]
    t_primes = [int(params[0] * k) for k in ks]
    # ratios whose finer grid has T' >= 12
    late = [r for r, tp in zip(ratios, t_primes[1:]) if tp >= 12]
    decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
    first_order = all(0.3 <= r <= 0.7 for r in late)
    out = [Check("convergence[p_star]", decreasing and first_order,
                 {"t_prime": t_primes, "gaps": gaps, "ratios": ratios})]

    params, ks = COUNTING_CONVERGENCE
    series = discrete_oracle.convergence_series(Scenario.from_params(*params), ks)
    gaps = [p.gap for p in series]
    out.append(Check("convergence[counting]", all(b < a for a, b in zip(gaps, gaps[1:])),
                     {"deltas": [str(p.delta) for p in series], "gaps": gaps}))
    return out


def check_monte_carlo(grid, trials: int, seed: int, workers: int = 1) -> list[Check]:
    out = []
    for params in grid:
        s = Scenario.from_params(*params)
        report = monte_carlo.estimate(s, trials, seed, workers=workers)
        uni = closed_form.p_universal(s)
        bound = uni.error_bound if uni.error_bound is not None else 0.0
        gap = abs(report.estimate - uni.value)
        allowed = bound + 4 * report.std_error
        tag = ",".join(str(p) for p in params)
        out.append(Check(f"mc_vs_universal[{tag}]", gap <= allowed, {
            "estimate": report.estimate, "std_error": report.std_error,
            "universal": uni.value, "error_bound": uni.error_bound,
            "gap": gap, "allowed": allowed,
        }))
        if params[3] == 1 and params[4] == 1:
            exact = closed_form.p_star(s).value
            gap = abs(report.estimate - exact)
            allowed = 4 * report.std_error
            out.append(Check(f"mc_vs_p_star[{tag}]", gap <= allowed, {
                "estimate": report.estimate, "p_star": exact, "gap": gap, "allowed": allowed,
            }))
    return out


def run_validation(grid: str = "small", trials: int = 200_000, seed: int = 7, workers: int = 1) -> list[Check]:
    if grid not in GRIDS:
        raise ValueError(f"unknown grid {grid!r}; choose from {sorted(GRIDS)}")
    cfg = GRIDS[grid]
    checks = check_published_examples()
    checks.append(check_oracle_equivalence(*cfg["box"]))
    checks.extend(check_convergence())
    checks.extend(check_monte_carlo(cfg["mc"], trials, seed, workers))
    return checks


def _finite_or_none(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def report_dict(checks: list[Check], **meta) -> dict[str, Any]:
    return {
        **meta,
        "passed": all(c.passed for c in checks),
        "checks": [
            {"name": c.name, "passed": c.passed,
             **{k: _finite_or_none(v) for k, v in c.details.items()}}
            for c in checks
        ],
    }
