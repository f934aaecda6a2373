"""Facility-location mechanisms.

Each mechanism is a pure function of a sorted :class:`LocationProfile`.
:class:`MechanismSpec` names one of them together with its parameters and
is the object the analysis and CLI layers pass around.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from facloc.core import LocationProfile, Outcome, Placement, RandomizedPlacement, point_cost

HALF = 0.5


def median(profile: LocationProfile) -> Placement:
    """Lower median report (1-based index ceil(n/2))."""
    return Placement([profile.reports[(profile.n + 1) // 2 - 1]])


def dictator(profile: LocationProfile, i: int) -> Placement:
    """The i-th smallest report (1-based).

    Profiles are anonymous, so "agent i" means the i-th order statistic.
    """
    if not 1 <= i <= profile.n:
        raise ValueError(f"dictator index {i} outside 1..{profile.n}")
    return Placement([profile.reports[i - 1]])


def fixed_point(p: float) -> Placement:
    return Placement([p])


def mean(profile: LocationProfile) -> Placement:
    """Average report.  Not truthful; kept as a negative control."""
    return Placement([min(1.0, math.fsum(profile.reports) / profile.n)])


def lrc(profile: LocationProfile) -> RandomizedPlacement:
    """Left-right-center: x_L and x_R w.p. 1/4 each, x_C w.p. 1/2."""
    return RandomizedPlacement(
        [
            (Placement([profile.left]), 0.25),
            (Placement([profile.right]), 0.25),
            (Placement([profile.center]), 0.5),
        ]
    )


def blrc(profile: LocationProfile) -> RandomizedPlacement:
    """Balanced LRC: the point 1/2 w.p. 1/3, otherwise LRC."""
    return RandomizedPlacement(
        [
            (Placement([HALF]), 1 / 3),
            (Placement([profile.left]), 1 / 6),
            (Placement([profile.right]), 1 / 6),
            (Placement([profile.center]), 1 / 3),
        ]
    )


def phantom_half(profile: LocationProfile) -> Placement:
    """Median of x_L, x_R and a phantom report at 1/2."""
    return Placement([min(max(HALF, profile.left), profile.right)])


def equal_spread(k: int) -> Placement:
    """Facilities at i/(2k-1) for odd i; ignores the reports."""
    _check_k(k)
    return Placement([(2 * j + 1) / (2 * k - 1) for j in range(k)])


def pec_options(k: int) -> tuple[Placement, Placement]:
    """The even and odd grids {2j/(2k-1)} and {(2j+1)/(2k-1)}, j < k."""
    _check_k(k)
    m = 2 * k - 1
    even = Placement([2 * j / m for j in range(k)])
    odd = Placement([(2 * j + 1) / m for j in range(k)])
    return even, odd


def pec(k: int) -> RandomizedPlacement:
    """Paired equal cost: even or odd grid with probability 1/2 each."""
    even, odd = pec_options(k)
    return RandomizedPlacement([(even, 0.5), (odd, 0.5)])


def epec(profile: LocationProfile, k: int) -> Placement:
    """Majority vote between the two PEC grids.

    Indifferent agents abstain; a tie, including unanimous indifference,
    goes to the even grid.
    """
    even, odd = pec_options(k)
    votes = 0
    for x in profile.reports:
        ce, co = point_cost(x, even), point_cost(x, odd)
        if ce < co:
            votes += 1
        elif co < ce:
            votes -= 1
    return odd if votes < 0 else even


def fifths_indices(n: int) -> tuple[int, int]:
    """1-based order statistics used by :func:`fifths`."""
    return max(1, -(-n // 5)), max(1, -(-4 * n // 5))


def fifths(profile: LocationProfile) -> Placement:
    """Two facilities at the 20th and 80th percentile reports."""
    lo, hi = fifths_indices(profile.n)
    return Placement([profile.reports[lo - 1], profile.reports[hi - 1]])


def _check_k(k: int) -> None:
    if k < 1:
        raise ValueError(f"need at least one facility, got k={k}")


# kind -> (randomized, truthful)
_KINDS: dict[str, tuple[bool, bool]] = {
    "median": (False, True),
    "dictator": (False, True),
    "fixed": (False, True),
    "mean": (False, False),
    "lrc": (True, True),
    "blrc": (True, True),
    "phantom-half": (False, True),
    "equal-spread": (False, True),
    "pec": (True, True),
    "epec": (False, True),
    "fifths": (False, True),
}
_MULTI = {"equal-spread", "pec", "epec"}


@dataclass(frozen=True)
class MechanismSpec:
    """A named mechanism plus parameters; calling it evaluates the mechanism.

    The canonical text form is ``kind`` or ``kind:param=value``:

    >>> str(MechanismSpec.parse("pec:k=3"))
    'pec:k=3'
    >>> MechanismSpec.parse("fixed:p=0.5")(LocationProfile([0, 1]))
    Placement(locations=(0.5,))
    """

    kind: str
    k: int = 1
    index: int = 1
    point: float = HALF

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown mechanism {self.kind!r}; choose from {', '.join(_KINDS)}")
        if self.kind == "fifths":
            object.__setattr__(self, "k", 2)
        elif self.kind not in _MULTI:
            object.__setattr__(self, "k", 1)
        _check_k(self.k)
        if self.index < 1:
            raise ValueError("dictator index is 1-based")
        if not 0.0 <= self.point <= 1.0:
            raise ValueError(f"fixed point {self.point!r} outside [0, 1]")

    @property
    def randomized(self) -> bool:
        return _KINDS[self.kind][0]

    @property
    def truthful(self) -> bool:
        return _KINDS[self.kind][1]

    @property
    def name(self) -> str:
        return str(self)

    def __call__(self, profile: LocationProfile) -> Outcome:
        return _DISPATCH[self.kind](self, profile)

    def __str__(self) -> str:
        if self.kind in _MULTI:
            return f"{self.kind}:k={self.k}"
        if self.kind == "dictator":
            return f"dictator:i={self.index}"
        if self.kind == "fixed":
            return f"fixed:p={self.point!r}"
        return self.kind

    @classmethod
    def parse(cls, text: str) -> MechanismSpec:
        kind, _, rest = text.strip().partition(":")
        kwargs: dict = {}
        for item in filter(None, rest.split(",")):
            key, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"bad mechanism parameter {item!r} in {text!r}")
            key = key.strip()
            try:
                if key == "k":
                    kwargs["k"] = int(value)
                elif key == "i":
                    kwargs["index"] = int(value)
                elif key == "p":
                    kwargs["point"] = float(value)
                else:
                    raise ValueError(f"unknown mechanism parameter {key!r}")
            except ValueError as exc:
                raise ValueError(f"bad mechanism spec {text!r}: {exc}") from None
        return cls(kind.strip(), **kwargs)


_DISPATCH: dict[str, Callable[[MechanismSpec, LocationProfile], Outcome]] = {
    "median": lambda s, x: median(x),
    "dictator": lambda s, x: dictator(x, s.index),
    "fixed": lambda s, x: fixed_point(s.point),
    "mean": lambda s, x: mean(x),
    "lrc": lambda s, x: lrc(x),
    "blrc": lambda s, x: blrc(x),
    "phantom-half": lambda s, x: phantom_half(x),
    "equal-spread": lambda s, x: equal_spread(s.k),
    "pec": lambda s, x: pec(s.k),
    "epec": lambda s, x: epec(x, s.k),
    "fifths": lambda s, x: fifths(x),
}

TRUTHFUL_SINGLE_DETERMINISTIC = tuple(
    MechanismSpec.parse(s)
    for s in ("median", "phantom-half", "dictator:i=1", "dictator:i=2", "fixed:p=0.5", "fixed:p=0.2", "equal-spread:k=1")
)
