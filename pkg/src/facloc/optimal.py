"""Exact optimal placements: the benchmarks additive errors are measured against."""

from __future__ import annotations

from dataclasses import dataclass

from facloc import kernels
from facloc.core import AVERAGE_COST, MAX_COST, CostKind, LocationProfile, Objective, Placement


@dataclass(frozen=True)
class OptResult:
    placement: Placement
    cost: float
    objective: Objective


def opt_max_single(profile: LocationProfile) -> OptResult:
    """One facility at the midpoint of the extremes."""
    return OptResult(Placement([profile.center]), (profile.right - profile.left) / 2.0, MAX_COST)


def opt_avg_single(profile: LocationProfile) -> OptResult:
    """One facility at the lower median; every point between the middle reports ties."""
    m = profile.reports[(profile.n + 1) // 2 - 1]
    return OptResult(Placement([m]), kernels.sum_nearest(profile.reports, (m,)) / profile.n, AVERAGE_COST)


def opt_max_k(profile: LocationProfile, k: int) -> OptResult:
    """k-center on the line.

    Binary search over the candidate diameters x_j - x_i with a greedy
    left-to-right cover as the feasibility test.
    """
    if k < 1:
        raise ValueError("k must be positive")
    radius, locs = kernels.kcenter(profile.reports, k)
    return OptResult(Placement(locs), radius, MAX_COST)


def opt_avg_k(profile: LocationProfile, k: int) -> OptResult:
    """k-median on the line by dynamic programming over contiguous clusters."""
    if k < 1:
        raise ValueError("k must be positive")
    total, locs = kernels.kmedian(profile.reports, k)
    return OptResult(Placement(locs), total / profile.n, AVERAGE_COST)


def optimum(profile: LocationProfile, k: int, objective: Objective) -> OptResult:
    if objective.kind is CostKind.MAX:
        res = opt_max_single(profile) if k == 1 else opt_max_k(profile, k)
        return OptResult(res.placement, res.cost, objective)
    return opt_avg_single(profile) if k == 1 else opt_avg_k(profile, k)
