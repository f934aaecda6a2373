"""Truthful facility location on [0, 1] measured by additive error."""

from facloc.analysis import (
    BudgetExceededError,
    DeviationWitness,
    ErrorReport,
    FivePointDistribution,
    additive_error,
    clone_last_reduction,
    deterministic_probe_k,
    deterministic_probe_single,
    duplicate_reduction,
    five_point_project,
    randomized_lb_certificate,
    truthfulness_check,
    worst_case_scan,
)
from facloc.core import (
    AVERAGE_COST,
    MAX_COST,
    CostKind,
    LocationProfile,
    MaxConvention,
    Objective,
    Placement,
    RandomizedPlacement,
    average_cost,
    expected_point_cost,
    max_cost,
    point_cost,
)
from facloc.mechanisms import MechanismSpec
from facloc.optimal import OptResult, opt_avg_k, opt_avg_single, opt_max_k, opt_max_single

__version__ = "0.1.0"
