"""Additive-error evaluation, worst-case search, truthfulness checks,
agent-count reductions, the five-point projection and lower-bound probes.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Protocol, Sequence

from facloc.core import (
    MAX_COST,
    CostKind,
    LocationProfile,
    MaxConvention,
    Objective,
    Outcome,
    Placement,
    RandomizedPlacement,
    as_randomized,
    expected_point_cost,
    objective_cost,
    point_cost,
)
from facloc.optimal import optimum

VIOLATION_TOL = 1e-9
DEFAULT_SCAN_BUDGET = 5_000_000
DEFAULT_VERIFY_BUDGET = 50_000_000


class BudgetExceededError(RuntimeError):
    """A scan or verification would examine more cases than allowed."""


class Mechanism(Protocol):
    k: int

    @property
    def randomized(self) -> bool: ...

    @property
    def name(self) -> str: ...

    def __call__(self, profile: LocationProfile) -> Outcome: ...


@dataclass(frozen=True)
class DeviationWitness:
    profile: tuple[float, ...]
    agent: int  # 1-based position in the sorted profile
    misreport: float
    truthful_cost: float
    deviated_cost: float
    gain: float
    coalition_size: int = 1

    def to_dict(self) -> dict:
        return {
            "profile": list(self.profile),
            "agent": self.agent,
            "misreport": self.misreport,
            "truthful_cost": self.truthful_cost,
            "deviated_cost": self.deviated_cost,
            "gain": self.gain,
            "coalition_size": self.coalition_size,
        }

    @classmethod
    def from_dict(cls, d: dict) -> DeviationWitness:
        return cls(
            tuple(d["profile"]),
            d["agent"],
            d["misreport"],
            d["truthful_cost"],
            d["deviated_cost"],
            d["gain"],
            d.get("coalition_size", 1),
        )


@dataclass(frozen=True)
class ErrorReport:
    mechanism: str
    objective: Objective
    profile: tuple[float, ...]
    mech_cost: float
    opt_cost: float
    error: float
    violation: DeviationWitness | None = None
    branch: str = ""

    def to_dict(self) -> dict:
        d = {
            "mechanism": self.mechanism,
            "objective": self.objective.to_dict(),
            "profile": list(self.profile),
            "mech_cost": self.mech_cost,
            "opt_cost": self.opt_cost,
            "error": self.error,
        }
        if self.violation is not None:
            d["violation"] = self.violation.to_dict()
        if self.branch:
            d["branch"] = self.branch
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ErrorReport:
        v = d.get("violation")
        return cls(
            d["mechanism"],
            Objective.from_dict(d["objective"]),
            tuple(d["profile"]),
            d["mech_cost"],
            d["opt_cost"],
            d["error"],
            DeviationWitness.from_dict(v) if v else None,
            d.get("branch", ""),
        )


def _costs(mechanism: Mechanism, profile: LocationProfile, objective: Objective) -> tuple[float, float]:
    mech = objective_cost(profile, mechanism(profile), objective)
    opt = optimum(profile, mechanism.k, objective).cost
    return mech, opt


def additive_error(mechanism: Mechanism, profile: LocationProfile, objective: Objective = MAX_COST) -> ErrorReport:
    mech, opt = _costs(mechanism, profile, objective)
    return ErrorReport(mechanism.name, objective, profile.reports, mech, opt, mech - opt)


def grid_points(grid: float) -> tuple[float, ...]:
    """Evenly spaced points 0..1 with spacing at most ``grid``."""
    if not 0.0 < grid <= 1.0:
        raise ValueError(f"grid spacing must lie in (0, 1], got {grid!r}")
    ratio = 1.0 / grid
    steps = round(ratio) if abs(ratio - round(ratio)) < 1e-9 else math.ceil(ratio)
    return tuple(i / steps for i in range(steps + 1))


def _profile_count(m: int, n: int) -> int:
    return math.comb(m + n - 1, n)


def _scan_chunk(args) -> tuple[float, tuple[float, ...] | None]:
    mechanism, objective, points, n, first = args
    best, witness = -math.inf, None
    tail_points = points[first:]
    for tail in itertools.combinations_with_replacement(tail_points, n - 1):
        reports = (points[first],) + tail
        mech, opt = _costs(mechanism, LocationProfile(reports), objective)
        if mech - opt > best:
            best, witness = mech - opt, reports
    return best, witness


def _refine(mechanism, objective, reports, best, step, rounds):
    current = list(reports)
    for _ in range(rounds):
        improved = False
        for i in range(len(current)):
            for t in range(-10, 11):
                trial = list(current)
                trial[i] = min(1.0, max(0.0, current[i] + t * step))
                cand = tuple(sorted(trial))
                mech, opt = _costs(mechanism, LocationProfile(cand), objective)
                if mech - opt > best:
                    best, current, improved = mech - opt, list(cand), True
        if not improved:
            break
    return best, tuple(current)


def worst_case_scan(
    mechanism: Mechanism,
    n: int,
    objective: Objective = MAX_COST,
    grid: float = 0.01,
    refine_rounds: int = 0,
    budget: int = DEFAULT_SCAN_BUDGET,
    workers: int = 1,
) -> ErrorReport:
    """Largest additive error over sorted profiles on a uniform grid.

    The result is a lower bound on the true worst case.  When the error is
    1-Lipschitz in each report it is also within ``n * grid`` of it.  Ties go
    to the lexicographically smallest profile, independent of ``workers``.
    ``refine_rounds`` passes of coordinate search at ``grid / 10`` follow.
    """
    if n < 1:
        raise ValueError("n must be positive")
    points = grid_points(grid)
    count = _profile_count(len(points), n)
    if count > budget:
        raise BudgetExceededError(f"{count} profiles exceed the scan budget of {budget}")
    tasks = [(mechanism, objective, points, n, i) for i in range(len(points))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_chunk, tasks))
    else:
        results = [_scan_chunk(t) for t in tasks]
    best, witness = -math.inf, None
    for err, reports in results:
        if err > best:
            best, witness = err, reports
    if refine_rounds > 0:
        step = (points[1] - points[0]) / 10.0
        best, witness = _refine(mechanism, objective, witness, best, step, refine_rounds)
    return additive_error(mechanism, LocationProfile(witness), objective)


def truthfulness_check(
    mechanism: Mechanism,
    n: int,
    grid: float,
    coalition_size: int = 1,
    budget: int = DEFAULT_VERIFY_BUDGET,
    tolerance: float = VIOLATION_TOL,
) -> list[DeviationWitness]:
    """Every profiled deviation on the grid that strictly helps the deviators.

    ``n`` counts all agents.  With ``coalition_size`` c > 1, each group of c
    co-located agents misreports jointly to every grid point.  An empty list
    means no violation at this resolution, not a proof of truthfulness.
    """
    c = coalition_size
    if c < 1 or n < c:
        raise ValueError(f"need 1 <= coalition_size <= n, got c={c}, n={n}")
    points = grid_points(grid)
    work = _profile_count(len(points), n) * n * len(points)
    if work > budget:
        raise BudgetExceededError(f"{work} deviation checks exceed the verification budget of {budget}")

    outcomes: dict[tuple[float, ...], Outcome] = {}

    def outcome(reports: tuple[float, ...]) -> Outcome:
        out = outcomes.get(reports)
        if out is None:
            out = outcomes[reports] = mechanism(LocationProfile(reports))
        return out

    witnesses = []
    for reports in itertools.combinations_with_replacement(points, n):
        truthful = outcome(reports)
        i = 0
        while i < n:
            x = reports[i]
            j = i
            while j < n and reports[j] == x:
                j += 1
            if j - i >= c:
                honest = expected_point_cost(x, truthful)
                rest = reports[:i] + reports[i + c :]
                for y in points:
                    if y == x:
                        continue
                    dev = tuple(sorted(rest + (y,) * c))
                    cost = expected_point_cost(x, outcome(dev))
                    if honest - cost > tolerance:
                        witnesses.append(DeviationWitness(reports, i + 1, y, honest, cost, honest - cost, c))
            i = j
    return witnesses


@dataclass(frozen=True)
class DuplicateReduction:
    """Runs ``inner`` on the profile with every report repeated ``q`` times."""

    inner: Mechanism
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be positive")

    @property
    def k(self) -> int:
        return self.inner.k

    @property
    def randomized(self) -> bool:
        return self.inner.randomized

    @property
    def name(self) -> str:
        return f"duplicate[q={self.q}]({self.inner.name})"

    def __call__(self, profile: LocationProfile) -> Outcome:
        return self.inner(LocationProfile([r for r in profile.reports for _ in range(self.q)]))


@dataclass(frozen=True)
class CloneLastReduction:
    """Runs ``inner`` on the profile with its last report duplicated."""

    inner: Mechanism

    @property
    def k(self) -> int:
        return self.inner.k

    @property
    def randomized(self) -> bool:
        return self.inner.randomized

    @property
    def name(self) -> str:
        return f"clone-last({self.inner.name})"

    def __call__(self, profile: LocationProfile) -> Outcome:
        return self.inner(LocationProfile(profile.reports + (profile.reports[-1],)))


def duplicate_reduction(mechanism: Mechanism, q: int) -> DuplicateReduction:
    return DuplicateReduction(mechanism, q)


def clone_last_reduction(mechanism: Mechanism) -> CloneLastReduction:
    return CloneLastReduction(mechanism)


FIVE_POINT_LABELS = ("0", "L", "C", "R", "1")


@dataclass(frozen=True)
class FivePointDistribution:
    """Facility distribution on the support (0, x_L, x_C, x_R, 1).

    When support points coincide, mass is booked on the first matching label.
    """

    probs: tuple[float, float, float, float, float]
    support: tuple[float, float, float, float, float]

    def __post_init__(self):
        if any(p < -1e-15 for p in self.probs):
            raise ValueError("negative probability")
        if abs(math.fsum(self.probs) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")

    p_0 = property(lambda self: self.probs[0])
    p_L = property(lambda self: self.probs[1])
    p_C = property(lambda self: self.probs[2])
    p_R = property(lambda self: self.probs[3])
    p_1 = property(lambda self: self.probs[4])

    def mean_location(self) -> float:
        return math.fsum(z * p for z, p in zip(self.support, self.probs))

    def to_randomized(self) -> RandomizedPlacement:
        return RandomizedPlacement((Placement([z]), max(p, 0.0)) for z, p in zip(self.support, self.probs))


def five_point_support(profile: LocationProfile) -> tuple[float, float, float, float, float]:
    return (0.0, profile.left, profile.center, profile.right, 1.0)


def five_point_project(rp: Outcome, profile: LocationProfile) -> FivePointDistribution:
    """Move each atom's mass onto its two neighbours in the support, keeping the mean."""
    rp = as_randomized(rp)
    if rp.k != 1:
        raise ValueError("five-point projection is for a single facility")
    support = five_point_support(profile)
    probs = [0.0] * 5
    for placement, w in rp.atoms:
        z = placement.locations[0]
        if z in support:
            probs[support.index(z)] += w
            continue
        lo = max(i for i, a in enumerate(support) if a < z)
        lo = support.index(support[lo])
        hi = support.index(min(a for a in support if a > z))
        z1, z2 = support[lo], support[hi]
        probs[lo] += w * (z2 - z) / (z2 - z1)
        probs[hi] += w * (z - z1) / (z2 - z1)
    return FivePointDistribution(tuple(probs), support)


# symmetric pair of profiles used by the randomized lower bound
PROFILE_A = (1 / 3, 2 / 3)
PROFILE_B = (0.0, 2 / 3)


def symmetric_cost_at_a(p01: float, p_lr: float, p_c: float) -> float:
    """Cost of the agent at 1/3 in profile A under a symmetric five-point rule."""
    return 0.5 - p_c / 3 - 2 * p_lr / 3


def symmetric_vectors(h: float) -> Iterator[tuple[float, float, float]]:
    """(p_01, p_LR, p_C) with 2 p_01 + 2 p_LR + p_C = 1 on an ``h`` grid."""
    steps = len(grid_points(h)) - 1
    for a in range(steps // 2 + 1):
        for b in range((steps - 2 * a) // 2 + 1):
            yield a / steps, b / steps, (steps - 2 * a - 2 * b) / steps


def randomized_lb_certificate(h: float = 0.01) -> float:
    """Minimum over symmetric five-point rules of the profile-A cost at 1/3.

    By truthfulness this cost is at most the cost of 1/3 in profile B, which
    equals the max-cost error at B, so the minimum lower-bounds the error of
    every truthful randomized mechanism.
    """
    if not 0.0 < h <= 0.1:
        raise ValueError("certificate grid must lie in (0, 0.1]")
    return min(symmetric_cost_at_a(*v) for v in symmetric_vectors(h))


def _single(outcome: Outcome) -> float:
    if not isinstance(outcome, Placement) or outcome.k != 1:
        raise ValueError("probe needs a deterministic single-facility mechanism")
    return outcome.locations[0]


def _worse(a: ErrorReport, b: ErrorReport) -> ErrorReport:
    return b if b.error > a.error else a


def deterministic_probe_single(mechanism: Mechanism, tolerance: float = VIOLATION_TOL) -> ErrorReport:
    """Force the 1/4 lower bound on a deterministic one-facility mechanism.

    With m = M(0, 1), probe (0, m) when m >= 1/2 and (m, 1) otherwise.  Either
    the probe has error >= 1/4, or the agent at m gains by moving to the far
    end; that deviation is attached to the report.
    """
    if mechanism.k != 1 or mechanism.randomized:
        raise ValueError("probe needs a deterministic single-facility mechanism")
    base = LocationProfile([0.0, 1.0])
    m = _single(mechanism(base))
    if m >= 0.5:
        probe, agent, misreport, branch = LocationProfile([0.0, m]), 2, 1.0, "right"
    else:
        probe, agent, misreport, branch = LocationProfile([m, 1.0]), 1, 0.0, "left"
    honest = point_cost(m, mechanism(probe))
    deviated = point_cost(m, mechanism(base))
    violation = None
    if honest - deviated > tolerance:
        violation = DeviationWitness(probe.reports, agent, misreport, honest, deviated, honest - deviated)
    rep = _worse(additive_error(mechanism, base), additive_error(mechanism, probe))
    return ErrorReport(rep.mechanism, rep.objective, rep.profile, rep.mech_cost, rep.opt_cost, rep.error, violation, branch)


def probe_profile_k(k: int) -> LocationProfile:
    """0, 2/(3k), then (i-1)/k for i = 3..k+1."""
    return LocationProfile([0.0, 2 / (3 * k)] + [(i - 1) / k for i in range(3, k + 2)])


def _coverage_gap(facilities: Sequence[float], k: int) -> str:
    def has(lo, hi, closed_lo=False, closed_hi=False):
        return any((lo <= f if closed_lo else lo < f) and (f <= hi if closed_hi else f < hi) for f in facilities)

    for i in range(2, k):
        if not has((i - 0.5) / k, (i + 0.5) / k):
            return f"no facility near {i}/{k}"
    if k >= 2 and not has((k - 0.5) / k, 1.0, closed_hi=True):
        return "no facility near 1"
    if not has(0.0, 1 / k, closed_lo=True, closed_hi=True):
        return f"no facility in [0, 1/{k}]"
    return ""


def deterministic_probe_k(mechanism: Mechanism, k: int | None = None, tolerance: float = VIOLATION_TOL) -> ErrorReport:
    """Force the 1/(6k) lower bound on a deterministic k-facility mechanism.

    On the k+1 agent profile 0, 2/(3k), 2/k, ..., 1 a low-error mechanism
    must keep one facility f in [0, 1/k].  If f >= 1/(3k) the agent at
    2/(3k) is moved onto f, otherwise the agent at 0 is; the moved agent
    either faces error >= 1/(6k) or gains by reporting its old position.
    """
    k = mechanism.k if k is None else k
    if mechanism.randomized or mechanism.k != k:
        raise ValueError("probe needs a deterministic mechanism placing k facilities")
    base = probe_profile_k(k)
    out = mechanism(base)
    if not isinstance(out, Placement):
        raise ValueError("probe needs a deterministic mechanism")
    base_rep = additive_error(mechanism, base)
    gap = _coverage_gap(out.locations, k)
    if gap:
        return ErrorReport(*_fields(base_rep), branch=gap)
    f = min((l for l in out.locations if l <= 1 / k), key=lambda l: (abs(l - 1 / (3 * k)), l))
    if f >= 1 / (3 * k):
        idx, old, branch = 1, base.reports[1], "move-second"
    else:
        idx, old, branch = 0, 0.0, "move-first"
    probe = base.replace(idx, f)
    honest = point_cost(f, mechanism(probe))
    deviated = point_cost(f, out)
    violation = None
    if honest - deviated > tolerance:
        agent = probe.reports.index(f) + 1
        violation = DeviationWitness(probe.reports, agent, old, honest, deviated, honest - deviated)
    rep = _worse(base_rep, additive_error(mechanism, probe))
    return ErrorReport(*_fields(rep), violation=violation, branch=branch)


def _fields(rep: ErrorReport) -> tuple:
    return rep.mechanism, rep.objective, rep.profile, rep.mech_cost, rep.opt_cost, rep.error


def paper_bound(mechanism: Mechanism, objective: Objective) -> float | None:
    """Proven upper bound on the additive error, or None when none is known."""
    kind = getattr(mechanism, "kind", None)
    k = mechanism.k
    if objective.kind is CostKind.MAX:
        table = {
            "blrc": 1 / 6,
            "lrc": 1 / 4,
            "phantom-half": 1 / 4,
            "median": 1 / 2,
            "dictator": 1 / 2,
            "mean": 1 / 2,
            "equal-spread": 1 / (2 * k - 1),
        }
        if kind == "fixed":
            return max(mechanism.point, 1 - mechanism.point)
        if kind == "pec" and objective.convention is MaxConvention.MAX_OF_EXPECTATIONS:
            return 1 / (4 * k - 2)
        return table.get(kind)
    table = {
        "median": 0.0,
        "pec": 1 / (4 * k - 2),
        "epec": 3 / (8 * k - 4),
        "fifths": 1 / 5,
        "equal-spread": 1 / (2 * k - 1),
    }
    return table.get(kind)
