"""Probability that two independent recurring events overlap at least once."""

from .closed_form import (
    BoundUnavailable,
    DerivedQuantities,
    Method,
    ProbabilityResult,
    derived_quantities,
    error_bound,
    p_approx,
    p_star,
    p_universal,
    p_universal_rate,
)
from .discrete_oracle import (
    CapExceeded,
    DegenerateError,
    DiscreteScenario,
    ExactProbability,
    brute_force_no_overlap,
    convergence_series,
    count_placements,
    exact_no_overlap_probability,
    p_star_grid,
)
from .domain import (
    DomainError,
    EventSpec,
    FeasibilityClass,
    Scenario,
    ValidationError,
    classify,
    normalize,
)
from .estimator import OverlapProbability
from .monte_carlo import PlacementSample, SimulationReport, estimate, has_overlap, sample_placements

__version__ = "0.1.0"
