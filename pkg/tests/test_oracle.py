import math

import numpy as np
import pytest

from wmdubins import (
    Configuration,
    LatticeOptions,
    PlanRequest,
    VehicleSpec,
    classical_dubins,
    enumerate_sequences,
    free_structure_solve,
    lattice_search,
    plan,
    verify_instance,
)
from wmdubins.kinematics import propagate_path
from wmdubins.oracle import HAVE_COMPILED_LATTICE, VERDICT_CONSISTENT
from wmdubins import _dubins_lb

from conftest import random_instance
from test_families import TURNAROUND_COST

needs_compiled = pytest.mark.skipif(
    not HAVE_COMPILED_LATTICE, reason="compiled lattice kernel not built"
)

TURN_START = Configuration(0.0, 0.0, 0.0)
TURN_GOAL = Configuration(0.0, 0.0, math.pi)
TURN_SPEC = VehicleSpec(1.0, 1.0, 1.0, 1.0)


def test_enumerate_sequences_counts():
    assert len(enumerate_sequences(1)) == 3
    assert len(enumerate_sequences(2)) == 9
    # 3 * (1 + 2 + 4 + 8 + 16) words without adjacent repeats
    seqs = enumerate_sequences(5)
    assert len(seqs) == 93
    assert len(set(seqs)) == 93
    for s in seqs:
        assert set(s) <= {"L", "R", "S"}
        assert all(a != b for a, b in zip(s, s[1:]))
    for bad in (0, -1, 7):
        with pytest.raises(ValueError):
            enumerate_sequences(bad)


def test_free_structure_rejects_bad_sequences():
    start = Configuration(0, 0, 0)
    goal = Configuration(1, 1, 0)
    for bad in ("", "LL", "LSX", "LSSR"):
        with pytest.raises(ValueError):
            free_structure_solve(bad, start, goal, TURN_SPEC)


def test_free_structure_spot_case():
    # two unit quarter-lefts bracketing a straight of 2, posed off-origin
    start = Configuration(2.0, 1.0, math.pi / 2)
    goal = Configuration(-2.0, 1.0, 3 * math.pi / 2)
    spec = VehicleSpec(1.0, 1.0)
    got = free_structure_solve("LSL", start, goal, spec)
    assert got is not None
    cost, segments = got
    assert cost == pytest.approx(math.pi + 2.0, abs=1e-9)
    end = propagate_path(start, segments, spec)
    assert (end.x, end.y) == pytest.approx((goal.x, goal.y), abs=1e-8)


def test_free_structure_finds_turnaround_optimum():
    got = free_structure_solve("LSRSL", TURN_START, TURN_GOAL, TURN_SPEC)
    assert got is not None
    cost, _ = got
    assert cost == pytest.approx(TURNAROUND_COST, abs=1e-7)


def test_free_structure_returns_none_when_word_cannot_close():
    # a lone straight cannot change the heading
    assert free_structure_solve("S", TURN_START, TURN_GOAL, TURN_SPEC) is None


def test_classical_reference_degenerate_and_straight():
    pose = Configuration(1.0, 2.0, 0.3)
    cost, segments = classical_dubins(pose, pose, 1.0, 1.0)
    assert cost == pytest.approx(0.0, abs=1e-12)
    cost, segments = classical_dubins(
        Configuration(0, 0, 0), Configuration(7, 0, 0), 2.0, 0.5
    )
    assert cost == pytest.approx(7.0, abs=1e-12)


def test_classical_reference_closes_and_matches_planner():
    rng = np.random.default_rng(21)
    for _ in range(100):
        start, goal, spec = random_instance(rng, mu_range=(0.0, 0.0))
        cost, segments = classical_dubins(
            start, goal, spec.radius_left, spec.radius_right
        )
        end = propagate_path(start, segments, spec)
        assert math.hypot(end.x - goal.x, end.y - goal.y) < 1e-8
        planned = plan(PlanRequest(start, goal, spec))
        assert cost == pytest.approx(planned.best.cost, abs=1e-9, rel=1e-9)


@needs_compiled
def test_compiled_tail_solvers_match_python():
    from wmdubins import _lattice as ext

    rng = np.random.default_rng(23)
    for _ in range(200):
        x0, y0, x1, y1 = rng.uniform(-8, 8, 4)
        th0, th1 = rng.uniform(0, 2 * math.pi, 2)
        rl, rr = rng.uniform(0.4, 2.5, 2)
        mul, mur = rng.uniform(0.0, 2.0, 2)
        a = _dubins_lb.dubins_length(x0, y0, th0, x1, y1, th1, rl, rr)
        b = ext.dubins_length_ref(x0, y0, th0, x1, y1, th1, rl, rr)
        assert a == pytest.approx(b, abs=1e-9)
        ca, sa = _dubins_lb.dubins_completion(x0, y0, th0, x1, y1, th1, rl, rr, mul, mur)
        cb, sb = ext.dubins_completion_ref(x0, y0, th0, x1, y1, th1, rl, rr, mul, mur)
        assert ca == pytest.approx(cb, abs=1e-9)
        assert [k for k, _ in sa] == [k for k, _ in sb]
        for (_, ma), (_, mb) in zip(sa, sb):
            assert ma == pytest.approx(mb, abs=1e-9)


@needs_compiled
def test_lattice_backends_agree_exactly():
    cases = [
        (TURN_START, TURN_GOAL, TURN_SPEC, LatticeOptions(heading_bins=36, xy_resolution=0.2)),
        (
            Configuration(0, 0, 0),
            Configuration(3.0, 2.0, 2.2),
            VehicleSpec(1.0, 0.8, 0.6, 0.3),
            LatticeOptions(heading_bins=72, xy_resolution=0.1),
        ),
        (
            TURN_START,
            TURN_GOAL,
            TURN_SPEC,
            LatticeOptions(
                heading_bins=36,
                xy_resolution=0.15,
                analytic_completion=False,
            ),
        ),
    ]
    for start, goal, spec, base in cases:
        results = {}
        for backend in ("python", "compiled"):
            opts = LatticeOptions(
                heading_bins=base.heading_bins,
                xy_resolution=base.xy_resolution,
                analytic_completion=base.analytic_completion,
                backend=backend,
            )
            stats: dict = {}
            cost, segments = lattice_search(start, goal, spec, opts, stats=stats)
            results[backend] = (cost, stats)
        c_py, s_py = results["python"]
        c_cc, s_cc = results["compiled"]
        assert s_py["backend"] == "python" and s_cc["backend"] == "compiled"
        assert c_py == pytest.approx(c_cc, abs=1e-9)
        # identical expansion order, not merely similar costs
        assert s_py["nodes"] == s_cc["nodes"]
        assert s_py["expanded"] == s_cc["expanded"]
        assert s_py["status"] == s_cc["status"]


def test_lattice_is_an_upper_bound_that_refines():
    planner_cost = plan(PlanRequest(TURN_START, TURN_GOAL, TURN_SPEC)).best.cost
    settings = [(36, 0.2), (72, 0.1), (144, 0.05)]
    costs = []
    for bins, res in settings:
        opts = LatticeOptions(heading_bins=bins, xy_resolution=res)
        cost, segments = lattice_search(TURN_START, TURN_GOAL, TURN_SPEC, opts)
        assert cost >= planner_cost - 1e-9
        assert segments, "expected a concrete path"
        costs.append(cost)
    assert costs[0] >= costs[1] >= costs[2]
    assert costs[2] <= planner_cost + LatticeOptions().slack_for(planner_cost)


def test_lattice_straight_goal_is_tight():
    cost, segments = lattice_search(
        Configuration(0, 0, 0), Configuration(5, 0, 0), VehicleSpec(1, 1, 0.5, 0.5)
    )
    assert 5.0 - 1e-9 <= cost <= 5.1
    assert [s.kind for s in segments] == ["S"]


def test_lattice_tolerance_mode_budget_and_exhaustion():
    stats: dict = {}
    cost, segments = lattice_search(
        TURN_START,
        TURN_GOAL,
        TURN_SPEC,
        LatticeOptions(analytic_completion=False, max_nodes=200),
        stats=stats,
    )
    assert cost == math.inf and segments == ()
    assert stats["status"] == 1

    # a goal heading off the lattice with a near-zero tolerance is unreachable
    stats = {}
    cost, segments = lattice_search(
        Configuration(0, 0, 0),
        Configuration(1.0, 0.5, 1.0),
        VehicleSpec(1.0, 1.0, 0.5, 0.5),
        LatticeOptions(
            heading_bins=36,
            xy_resolution=0.3,
            box_margin=2.0,
            analytic_completion=False,
            goal_heading_tol=1e-9,
        ),
        stats=stats,
    )
    assert cost == math.inf
    assert stats["status"] == 2


def test_lattice_tolerance_mode_bound_still_holds():
    opts = LatticeOptions(heading_bins=36, xy_resolution=0.15, analytic_completion=False)
    cost, _ = lattice_search(TURN_START, TURN_GOAL, TURN_SPEC, opts)
    planner_cost = plan(PlanRequest(TURN_START, TURN_GOAL, TURN_SPEC)).best.cost
    assert planner_cost <= cost + opts.slack_for(planner_cost)


def test_lattice_options_validation():
    with pytest.raises(ValueError):
        LatticeOptions(heading_bins=12)
    with pytest.raises(ValueError):
        LatticeOptions(xy_resolution=0.0)
    with pytest.raises(ValueError):
        LatticeOptions(cost_slack=-0.1)
    with pytest.raises(ValueError):
        LatticeOptions(max_nodes=0)
    with pytest.raises(ValueError):
        LatticeOptions(backend="gpu")
    with pytest.raises(ValueError):
        LatticeOptions(control_set=(("X", 0.1),))


def test_verify_instance_consistent_on_mixed_instances():
    rng = np.random.default_rng(29)
    for _ in range(3):
        start, goal, spec = random_instance(rng, box=8.0)
        report = verify_instance(start, goal, spec)
        assert report.verdict == VERDICT_CONSISTENT
        assert report.planner_cost > 0
        assert math.isfinite(report.lattice_cost)
        assert report.best_free_sequence
        assert report.details["lattice"]["status"] == 0

    report = verify_instance(
        Configuration(0, 0, 0), Configuration(4, 3, 1.0), VehicleSpec(1.0, 1.0)
    )
    assert report.verdict == VERDICT_CONSISTENT
    assert report.details["planner_mode"] == "classical"
