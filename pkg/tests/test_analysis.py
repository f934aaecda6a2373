import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from facloc.analysis import (
    PROFILE_A,
    PROFILE_B,
    BudgetExceededError,
    DeviationWitness,
    ErrorReport,
    additive_error,
    clone_last_reduction,
    deterministic_probe_k,
    deterministic_probe_single,
    duplicate_reduction,
    five_point_project,
    grid_points,
    paper_bound,
    probe_profile_k,
    randomized_lb_certificate,
    symmetric_cost_at_a,
    symmetric_vectors,
    truthfulness_check,
    worst_case_scan,
)
from facloc.core import (
    AVERAGE_COST,
    MAX_COST,
    LocationProfile,
    MaxConvention,
    Objective,
    Placement,
    RandomizedPlacement,
    expected_point_cost,
    max_cost,
)
from facloc.mechanisms import TRUTHFUL_SINGLE_DETERMINISTIC, MechanismSpec, blrc

P = LocationProfile
M = MechanismSpec.parse
unit = st.floats(0.0, 1.0, allow_nan=False)


def test_additive_error_examples():
    for z in (0.1, 0.5, 2 / 3, 1.0):
        assert additive_error(M("blrc"), P([0, z])).error == pytest.approx(1 / 6, abs=1e-12)
    assert additive_error(M("fixed:p=0.5"), P([0, 1])).error == 0.0
    assert additive_error(M("equal-spread:k=2"), P([2 / 3])).error == pytest.approx(1 / 3, abs=1e-12)


def test_blrc_two_agent_closed_form():
    x, y = 0.1, 0.9
    expected = max(abs(y - 0.5), abs(x - 0.5)) / 3
    assert additive_error(M("blrc"), P([x, y])).error == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(2 / 15)


def test_grid_points():
    assert grid_points(0.25) == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert len(grid_points(0.01)) == 101
    assert grid_points(0.3) == (0.0, 0.25, 0.5, 0.75, 1.0)
    with pytest.raises(ValueError):
        grid_points(0)


def test_scan_examples():
    r = worst_case_scan(M("blrc"), 2, MAX_COST, 0.01)
    assert 1 / 6 - 0.02 <= r.error <= 1 / 6 + 1e-9
    r = worst_case_scan(M("phantom-half"), 2, MAX_COST, 0.01)
    assert 1 / 4 - 0.02 <= r.error <= 1 / 4 + 1e-9
    r = worst_case_scan(M("mean"), 2, MAX_COST, 0.25)
    assert r.error >= 0.0 and r.profile


def test_scan_tie_break_is_lexicographic():
    # the fixed point 1/2 has error 1/2 exactly at (0,0) and (1,1)
    r = worst_case_scan(M("fixed:p=0.5"), 2, MAX_COST, 0.25)
    assert r.profile == (0.0, 0.0)


def test_scan_parallel_matches_serial():
    spec = M("epec:k=2")
    a = worst_case_scan(spec, 3, AVERAGE_COST, 0.1)
    b = worst_case_scan(spec, 3, AVERAGE_COST, 0.1, workers=3)
    assert a == b


def test_scan_refinement_only_improves():
    spec = M("lrc")
    coarse = worst_case_scan(spec, 2, MAX_COST, 0.3)
    refined = worst_case_scan(spec, 2, MAX_COST, 0.3, refine_rounds=3)
    assert refined.error >= coarse.error
    assert refined.error <= 1 / 4 + 1e-9


def test_scan_budget():
    with pytest.raises(BudgetExceededError):
        worst_case_scan(M("blrc"), 6, MAX_COST, 0.01)
    with pytest.raises(BudgetExceededError):
        truthfulness_check(M("blrc"), 4, 0.01, budget=1000)


def test_truthfulness_examples():
    assert truthfulness_check(M("median"), 3, 0.1) == []
    found = truthfulness_check(M("mean"), 2, 0.25)
    assert DeviationWitness((0.0, 0.5), 2, 1.0, 0.25, 0.0, 0.25) in found
    assert truthfulness_check(M("epec:k=2"), 3, 0.1) == []


@pytest.mark.parametrize("spec", ["median", "phantom-half", "blrc", "epec:k=2", "fifths"])
def test_coalitions_cannot_gain(spec):
    assert truthfulness_check(M(spec), 4, 0.125, coalition_size=2) == []


def test_mean_coalition_gains():
    assert truthfulness_check(M("mean"), 3, 0.25, coalition_size=2)


def test_witness_serialisation_roundtrip():
    w = truthfulness_check(M("mean"), 2, 0.25)[0]
    assert DeviationWitness.from_dict(json.loads(json.dumps(w.to_dict()))) == w
    r = additive_error(M("blrc"), P([0, 0.4]))
    assert ErrorReport.from_dict(json.loads(json.dumps(r.to_dict()))) == r
    assert set(r.to_dict()) == {"mechanism", "objective", "profile", "mech_cost", "opt_cost", "error"}


def test_duplicate_reduction_examples():
    red = duplicate_reduction(M("blrc"), 2)
    assert red(P([0, 1])) == blrc(P([0, 1]))
    assert duplicate_reduction(M("median"), 3)(P([0.2, 0.8])) == Placement([0.2])
    xa = P([0.3, 0.7])
    xb = P([0.3, 0.3, 0.7, 0.7])
    assert additive_error(red, xa).error == pytest.approx(additive_error(M("blrc"), xb).error, abs=1e-12)


def test_clone_last_examples():
    assert clone_last_reduction(M("median"))(P([0, 1])) == Placement([1.0])
    spec = M("phantom-half")
    red = clone_last_reduction(spec)
    for x in ([0.1, 0.4], [0.2, 0.9], [0.6, 0.7]):
        assert red(P(x)) == spec(P(x))


def test_reductions_stay_truthful():
    assert truthfulness_check(duplicate_reduction(M("median"), 2), 2, 0.1) == []
    assert truthfulness_check(clone_last_reduction(M("blrc")), 2, 0.1) == []


def test_five_point_examples():
    x = P([0, 1])
    fp = five_point_project(RandomizedPlacement.point_mass(Placement([0.3])), x)
    assert fp.p_0 == pytest.approx(0.4) and fp.p_C == pytest.approx(0.6)
    assert fp.mean_location() == pytest.approx(0.3, abs=1e-12)
    fp = five_point_project(Placement([0.5]), x)
    assert fp.p_C == 1.0


@st.composite
def single_distributions(draw):
    m = draw(st.integers(1, 6))
    locs = draw(st.lists(unit, min_size=m, max_size=m))
    raw = draw(st.lists(st.floats(0.01, 1.0), min_size=m, max_size=m))
    total = sum(raw)
    atoms = [(Placement([z]), w / total) for z, w in zip(locs, raw[:-1])]
    atoms.append((Placement([locs[-1]]), 1.0 - sum(w for _, w in atoms)))
    return RandomizedPlacement(atoms)


@given(single_distributions(), st.lists(unit, min_size=2, max_size=4))
def test_projection_properties(rp, reports):
    x = P(reports)
    fp = five_point_project(rp, x)
    proj = fp.to_randomized()
    assert proj.mean_location() == pytest.approx(rp.mean_location(), abs=1e-12)
    for p in grid_points(0.05):
        assert expected_point_cost(p, proj) >= expected_point_cost(p, rp) - 1e-12
    # the extremes are support points, so no split interval contains them
    for r in (x.left, x.right):
        assert expected_point_cost(r, proj) == pytest.approx(expected_point_cost(r, rp), abs=1e-12)
    assert max_cost(x, proj) == pytest.approx(max_cost(x, rp), abs=1e-12)


def test_certificate_examples():
    assert randomized_lb_certificate(0.01) == pytest.approx(1 / 6, abs=1e-12)
    assert symmetric_cost_at_a(0.5, 0.0, 0.0) == pytest.approx(0.5)
    assert symmetric_cost_at_a(0.0, 0.5, 0.0) == pytest.approx(1 / 6)
    values = [randomized_lb_certificate(h) for h in (0.1, 0.05, 0.02, 0.01)]
    assert all(abs(v - 1 / 6) <= 1e-12 for v in values)


def test_certificate_linear_form_matches_direct_expectation():
    a = P(PROFILE_A)
    for p01, plr, pc in symmetric_vectors(0.1):
        atoms = [(Placement([z]), w) for z, w in zip((0, 1 / 3, 0.5, 2 / 3, 1), (p01, plr, pc, plr, p01))]
        rp = RandomizedPlacement(atoms)
        assert symmetric_cost_at_a(p01, plr, pc) == pytest.approx(expected_point_cost(1 / 3, rp), abs=1e-12)
        assert 2 * p01 + 2 * plr + pc == pytest.approx(1.0)
    assert a.center == 0.5


@given(single_distributions())
def test_profile_b_error_equals_cost_of_one_third(rp):
    b = P(PROFILE_B)
    err = max_cost(b, rp) - 1 / 3
    assert err == pytest.approx(expected_point_cost(1 / 3, rp), abs=1e-12)


def test_probe_single_examples():
    r = deterministic_probe_single(M("phantom-half"))
    assert r.profile == (0.0, 0.5) and r.error == 0.25
    r = deterministic_probe_single(M("dictator:i=2"))
    assert r.profile == (0.0, 1.0) and r.error == 0.5
    r = deterministic_probe_single(M("median"))
    assert r.error == 0.5 and r.branch == "left"


@pytest.mark.parametrize("spec", TRUTHFUL_SINGLE_DETERMINISTIC, ids=str)
def test_probe_single_bound(spec):
    r = deterministic_probe_single(spec)
    assert r.violation is None
    assert r.error >= 0.25 - 1e-9


def test_probe_single_catches_mean():
    # mean(0,1)=1/2; probe (0,1/2) puts the facility at 1/4, so the agent at
    # 1/2 gains by reporting 1
    r = deterministic_probe_single(M("mean"))
    assert r.violation is not None and r.violation.gain == pytest.approx(0.25)


def test_probe_rejects_randomized():
    with pytest.raises(ValueError):
        deterministic_probe_single(M("blrc"))
    with pytest.raises(ValueError):
        deterministic_probe_k(M("pec:k=2"))


@pytest.mark.parametrize("spec", ["equal-spread:k=2", "equal-spread:k=3", "epec:k=2", "epec:k=3", "equal-spread:k=5"])
def test_probe_k_bound(spec):
    mech = M(spec)
    r = deterministic_probe_k(mech)
    assert r.violation is None
    assert r.error >= 1 / (6 * mech.k) - 1e-9


def test_probe_k_one_matches_single():
    assert probe_profile_k(1).reports == (0.0, 2 / 3)
    for spec in TRUTHFUL_SINGLE_DETERMINISTIC:
        assert deterministic_probe_k(spec, 1).error >= 1 / 6 - 1e-9
        assert deterministic_probe_single(spec).error >= 1 / 6


def test_probe_k_coverage_branch():
    # every facility parked at 0 leaves the agent at 1 uncovered
    class Corner:
        k, randomized, name = 2, False, "corner"

        def __call__(self, profile):
            return Placement([0.0, 0.0])

    r = deterministic_probe_k(Corner())
    assert r.branch == "no facility near 1"
    assert r.error >= 1 / 12


def test_paper_bounds_table():
    assert paper_bound(M("blrc"), MAX_COST) == pytest.approx(1 / 6)
    assert paper_bound(M("pec:k=2"), MAX_COST) is None
    moe = Objective(MAX_COST.kind, MaxConvention.MAX_OF_EXPECTATIONS)
    assert paper_bound(M("pec:k=2"), moe) == pytest.approx(1 / 6)
    assert paper_bound(M("epec:k=3"), AVERAGE_COST) == pytest.approx(3 / 20)


@pytest.mark.parametrize(
    "spec,n,obj,grid",
    [
        ("lrc", 2, MAX_COST, 0.02),
        ("blrc", 3, MAX_COST, 0.05),
        ("phantom-half", 3, MAX_COST, 0.05),
        ("equal-spread:k=2", 2, MAX_COST, 0.02),
        ("equal-spread:k=3", 2, AVERAGE_COST, 0.02),
        ("pec:k=2", 2, AVERAGE_COST, 0.05),
        ("pec:k=3", 3, AVERAGE_COST, 0.1),
        ("epec:k=3", 3, AVERAGE_COST, 0.05),
        ("median", 3, AVERAGE_COST, 0.05),
        ("dictator:i=2", 3, MAX_COST, 0.05),
    ],
)
def test_scans_respect_bounds(spec, n, obj, grid):
    mech = M(spec)
    r = worst_case_scan(mech, n, obj, grid)
    assert -1e-9 <= r.error <= paper_bound(mech, obj) + 1e-9


def test_pec_max_cost_depends_on_convention():
    spec = M("pec:k=2")
    x = P([0, 1])
    eom = additive_error(spec, x, MAX_COST)
    moe = additive_error(spec, x, Objective(MAX_COST.kind, MaxConvention.MAX_OF_EXPECTATIONS))
    assert eom.error == pytest.approx(1 / 3)
    assert moe.error == pytest.approx(1 / 6)
    assert worst_case_scan(spec, 2, moe.objective, 0.05).error <= 1 / 6 + 1e-9


def test_errors_never_negative():
    rng = random.Random(3)
    specs = [M(s) for s in ("median", "lrc", "blrc", "phantom-half", "pec:k=2", "epec:k=2", "fifths", "mean")]
    for _ in range(200):
        x = P(rng.random() for _ in range(rng.randint(1, 6)))
        for spec in specs:
            for obj in (MAX_COST, AVERAGE_COST):
                assert additive_error(spec, x, obj).error >= -1e-9
