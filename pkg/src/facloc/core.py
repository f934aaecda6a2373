"""Location profiles, placements and the cost algebra on the unit interval.

All positions live on [0, 1].  Results carry over to an interval [0, M] by
multiplying every position, cost and error by M.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from facloc import kernels

PROB_TOL = 1e-12


def _check_unit(values: Sequence[float], what: str) -> None:
    for v in values:
        if not (0.0 <= v <= 1.0) or math.isnan(v):
            raise ValueError(f"{what} {v!r} outside [0, 1]")


@dataclass(frozen=True)
class LocationProfile:
    """Agent reports, stored sorted.

    >>> LocationProfile([0.9, 0.2, 0.4]).reports
    (0.2, 0.4, 0.9)
    """

    reports: tuple[float, ...]

    def __init__(self, reports: Iterable[float]):
        values = tuple(sorted(float(r) for r in reports))
        if not values:
            raise ValueError("a profile needs at least one agent")
        _check_unit(values, "report")
        object.__setattr__(self, "reports", values)

    @property
    def n(self) -> int:
        return len(self.reports)

    @property
    def left(self) -> float:
        return self.reports[0]

    @property
    def right(self) -> float:
        return self.reports[-1]

    @property
    def center(self) -> float:
        return (self.reports[0] + self.reports[-1]) / 2.0

    def replace(self, index: int, value: float) -> LocationProfile:
        """Profile with the report at 0-based sorted ``index`` swapped for ``value``."""
        r = list(self.reports)
        r[index] = value
        return LocationProfile(r)

    def __len__(self) -> int:
        return len(self.reports)

    def __iter__(self):
        return iter(self.reports)


@dataclass(frozen=True)
class Placement:
    """k facility locations, kept sorted; duplicates allowed."""

    locations: tuple[float, ...]

    def __init__(self, locations: Iterable[float]):
        values = tuple(sorted(float(v) for v in locations))
        if not values:
            raise ValueError("a placement needs at least one facility")
        _check_unit(values, "facility")
        object.__setattr__(self, "locations", values)

    @property
    def k(self) -> int:
        return len(self.locations)


@dataclass(frozen=True)
class RandomizedPlacement:
    """Finite distribution over placements of equal arity.

    Atoms at identical placements are merged and zero-mass atoms dropped, so
    two equal distributions always compare equal.
    """

    atoms: tuple[tuple[Placement, float], ...]

    def __init__(self, atoms: Iterable[tuple[Placement, float]]):
        merged: dict[Placement, float] = {}
        for placement, prob in atoms:
            if not isinstance(placement, Placement):
                placement = Placement(placement)
            prob = float(prob)
            if prob < -PROB_TOL or prob > 1.0 + PROB_TOL:
                raise ValueError(f"probability {prob!r} outside [0, 1]")
            merged[placement] = merged.get(placement, 0.0) + prob
        kept = tuple(sorted(((p, w) for p, w in merged.items() if w > 0.0), key=lambda a: a[0].locations))
        if not kept:
            raise ValueError("distribution has no mass")
        total = math.fsum(w for _, w in kept)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        if len({p.k for p, _ in kept}) != 1:
            raise ValueError("all atoms must place the same number of facilities")
        object.__setattr__(self, "atoms", kept)
        # cached kernel inputs
        object.__setattr__(self, "_locs", tuple(p.locations for p, _ in kept))
        object.__setattr__(self, "_probs", tuple(w for _, w in kept))

    _locs: tuple = field(init=False, repr=False, compare=False)
    _probs: tuple = field(init=False, repr=False, compare=False)

    @classmethod
    def point_mass(cls, placement: Placement) -> RandomizedPlacement:
        return cls([(placement, 1.0)])

    @classmethod
    def mixture(cls, parts: Iterable[tuple[float, Union[Placement, "RandomizedPlacement"]]]) -> RandomizedPlacement:
        """Weighted mixture of placements or distributions."""
        atoms = []
        for weight, part in parts:
            for placement, prob in as_randomized(part).atoms:
                atoms.append((placement, weight * prob))
        return cls(atoms)

    @property
    def k(self) -> int:
        return self.atoms[0][0].k

    def mean_location(self) -> float:
        """Expected facility position (single-facility distributions)."""
        if self.k != 1:
            raise ValueError("mean location is defined for one facility only")
        return math.fsum(p.locations[0] * w for p, w in self.atoms)

    def as_dict(self) -> dict[tuple[float, ...], float]:
        return {p.locations: w for p, w in self.atoms}


Outcome = Union[Placement, RandomizedPlacement]


def as_randomized(outcome: Outcome) -> RandomizedPlacement:
    if isinstance(outcome, RandomizedPlacement):
        return outcome
    return RandomizedPlacement.point_mass(outcome)


class CostKind(enum.Enum):
    MAX = "max"
    AVERAGE = "avg"


class MaxConvention(enum.Enum):
    """How randomized placements are scored under the max-cost objective."""

    EXPECTATION_OF_MAX = "expectation-of-max"
    MAX_OF_EXPECTATIONS = "max-of-expectations"


@dataclass(frozen=True)
class Objective:
    kind: CostKind = CostKind.MAX
    convention: MaxConvention = MaxConvention.EXPECTATION_OF_MAX

    @classmethod
    def parse(cls, kind: str, convention: str | None = None) -> Objective:
        conv = MaxConvention(convention) if convention else MaxConvention.EXPECTATION_OF_MAX
        return cls(CostKind(kind), conv)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "convention": self.convention.value}

    @classmethod
    def from_dict(cls, d: dict) -> Objective:
        return cls.parse(d["kind"], d.get("convention"))

    def __str__(self) -> str:
        if self.kind is CostKind.MAX and self.convention is not MaxConvention.EXPECTATION_OF_MAX:
            return f"{self.kind.value}/{self.convention.value}"
        return self.kind.value


MAX_COST = Objective(CostKind.MAX)
AVERAGE_COST = Objective(CostKind.AVERAGE)


def point_cost(p: float, placement: Placement) -> float:
    """Distance from ``p`` to its closest facility."""
    return kernels.nearest(p, placement.locations)


def expected_point_cost(p: float, outcome: Outcome) -> float:
    if isinstance(outcome, Placement):
        return kernels.nearest(p, outcome.locations)
    return kernels.expected_nearest(p, outcome._locs, outcome._probs)


def max_cost(profile: LocationProfile, outcome: Outcome, objective: Objective = MAX_COST) -> float:
    """Largest agent cost; for distributions the convention in ``objective`` applies."""
    if isinstance(outcome, Placement):
        return kernels.max_nearest(profile.reports, outcome.locations)
    if objective.convention is MaxConvention.EXPECTATION_OF_MAX:
        return math.fsum(w * kernels.max_nearest(profile.reports, locs) for locs, w in zip(outcome._locs, outcome._probs))
    return max(expected_point_cost(x, outcome) for x in profile.reports)


def average_cost(profile: LocationProfile, outcome: Outcome) -> float:
    # expectation and mean commute, so one path serves both outcome types
    if isinstance(outcome, Placement):
        return kernels.sum_nearest(profile.reports, outcome.locations) / profile.n
    total = math.fsum(w * kernels.sum_nearest(profile.reports, locs) for locs, w in zip(outcome._locs, outcome._probs))
    return total / profile.n


def objective_cost(profile: LocationProfile, outcome: Outcome, objective: Objective) -> float:
    if objective.kind is CostKind.MAX:
        return max_cost(profile, outcome, objective)
    return average_cost(profile, outcome)
