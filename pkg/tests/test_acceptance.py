"""End-to-end acceptance checks for the planner.

Each test prints one [PASS]/[FAIL] summary line (visible even under output
capture) so a full run doubles as an acceptance report.
"""

import json
import math
import time

import numpy as np
import pytest

from wmdubins import (
    Configuration,
    PlanRequest,
    Segment,
    VehicleSpec,
    classical_dubins,
    cli,
    path_cost,
    plan,
)
from wmdubins.families import junction_s_length, lambda_from_mid_turn_angle
from wmdubins.kinematics import propagate_path
from wmdubins.model import from_canonical, mirror_configuration, mirror_vehicle

from conftest import random_instance

TURN_START = Configuration(0.0, 0.0, 0.0)
TURN_GOAL = Configuration(0.0, 0.0, math.pi)
WEIGHTED_SPEC = VehicleSpec(1.0, 1.0, 1.0, 1.0)
CLASSICAL_SPEC = VehicleSpec(1.0, 1.0)

DEG = 180.0 / math.pi


def _report(capsys, name, ok, detail=""):
    with capsys.disabled():
        tag = "PASS" if ok else "FAIL"
        print(f"[{tag}] {name}: {detail}", flush=True)


@pytest.fixture(scope="module")
def weighted_turnaround():
    t0 = time.perf_counter()
    result = plan(PlanRequest(TURN_START, TURN_GOAL, WEIGHTED_SPEC))
    elapsed = time.perf_counter() - t0
    return result, elapsed


def test_weighted_turnaround_geometry(weighted_turnaround, capsys):
    result, elapsed = weighted_turnaround
    best = result.best
    m = [s.measure for s in best.segments]
    checks = {
        "family": best.family == "LSRSL",
        "outer_angles": all(abs(m[i] * DEG - 32.53) <= 0.05 for i in (0, 4)),
        "interior_angle": abs(m[2] * DEG - 245.07) <= 0.05,
        "straights": all(abs(m[i] - 1.28) <= 0.01 for i in (1, 3)),
        "cost": abs(best.cost - 13.377) <= 0.01,
        "runtime": elapsed < 1.0,
    }
    ok = all(checks.values())
    _report(
        capsys,
        "weighted turn-around",
        ok,
        f"family={best.family} angles={[round(v * DEG, 4) for v in m[::2]]} deg "
        f"straights={[round(m[1], 5), round(m[3], 5)]} m cost={best.cost:.6f} "
        f"({elapsed * 1e3:.0f} ms)",
    )
    assert ok, {k: v for k, v in checks.items() if not v}


def test_classical_turnaround_geometry(capsys):
    result = plan(PlanRequest(TURN_START, TURN_GOAL, CLASSICAL_SPEC))
    best = result.best
    m = [s.measure for s in best.segments]
    checks = {
        "mode": result.mode == "classical",
        "family": best.family in ("LRL", "RLR"),
        "angles": all(
            abs(v * DEG - want) <= 0.01 for v, want in zip(m, (60.0, 300.0, 60.0))
        ),
        "cost": abs(best.cost - 7.33038) <= 1e-4,
    }
    ok = all(checks.values())
    _report(
        capsys,
        "classical turn-around",
        ok,
        f"family={best.family} angles={[round(v * DEG, 4) for v in m]} deg "
        f"cost={best.cost:.6f}",
    )
    assert ok, {k: v for k, v in checks.items() if not v}


def test_interior_angle_parameter_consistency(weighted_turnaround, capsys):
    result, _ = weighted_turnaround
    segments = result.best.segments
    lam = lambda_from_mid_turn_angle(segments[2].measure)
    junction = junction_s_length(lam, WEIGHTED_SPEC)
    rel_errors = [
        abs(segments[i].measure - junction) / junction for i in (1, 3)
    ]
    checks = {
        "lambda": abs(lam.value - 1.85977) <= 1e-3,
        "junction": abs(junction - 1.27548) <= 1e-3,
        "emitted_straights": max(rel_errors) <= 1e-6,
    }
    ok = all(checks.values())
    _report(
        capsys,
        "interior-angle parameter consistency",
        ok,
        f"lambda={lam.value:.6f} junction={junction:.6f} m "
        f"max_rel_err={max(rel_errors):.2e}",
    )
    assert ok, {k: v for k, v in checks.items() if not v}


def test_vanishing_penalties_reduce_to_classical(capsys):
    rng = np.random.default_rng(404)
    worst_gap = 0.0
    worst_junction = 0.0
    violations = []
    for i in range(200):
        start, goal, spec = random_instance(rng, mu_range=(0.0, 0.0))
        tiny = VehicleSpec(spec.radius_left, spec.radius_right, 1e-6, 1e-6)
        result = plan(PlanRequest(start, goal, tiny))
        ref_cost, _ = classical_dubins(start, goal, spec.radius_left, spec.radius_right)
        gap = abs(result.best.cost - ref_cost)
        worst_gap = max(worst_gap, gap)
        if gap > 1e-4:
            violations.append((i, "cost", gap))
        segs = result.best.segments
        if len(segs) >= 4:
            for j in range(1, len(segs) - 1):
                if (
                    segs[j].kind == "S"
                    and segs[j - 1].is_arc
                    and segs[j + 1].is_arc
                ):
                    worst_junction = max(worst_junction, segs[j].measure)
                    if segs[j].measure > 1e-3:
                        violations.append((i, "junction", segs[j].measure))
    ok = not violations
    _report(
        capsys,
        "vanishing penalties reduce to classical",
        ok,
        f"200 instances, worst cost gap {worst_gap:.2e} m, "
        f"worst junction straight {worst_junction:.2e} m",
    )
    assert ok, violations[:5]


def test_straight_detour_beats_triple_turn_by_margin(capsys):
    rng = np.random.default_rng(505)
    worst_slack = math.inf
    violations = []
    for i in range(50):
        rl, rr = rng.uniform(0.5, 2.0, 2)
        mul, mur = rng.uniform(0.1, 2.0, 2)
        spec = VehicleSpec(rl, rr, mul, mur)
        alpha, gamma = rng.uniform(0.2, 2.5, 2)
        start = Configuration(*rng.uniform(-5, 5, 2), rng.uniform(0, 2 * math.pi))
        outer, inner = ("L", "R") if i % 2 == 0 else ("R", "L")
        ccc = (
            Segment(outer, alpha),
            Segment(inner, math.pi),
            Segment(outer, gamma),
        )
        goal = propagate_path(start, ccc, spec)
        ccc_cost = path_cost(ccc, spec)
        delta = 0.5 * min(alpha, gamma, 0.5 * math.pi)
        margin = 2.0 * (rl + rr) * (delta + math.cos(delta) - 1.0)
        planned = plan(PlanRequest(start, goal, spec)).best.cost
        slack = (ccc_cost - planned) - margin
        worst_slack = min(worst_slack, slack)
        if planned >= ccc_cost or slack < -1e-6:
            violations.append((i, planned, ccc_cost, margin))
    ok = not violations
    _report(
        capsys,
        "straight detour beats triple-turn",
        ok,
        f"50 constructions, min (saving - guaranteed margin) = {worst_slack:.6f} m",
    )
    assert ok, violations[:5]


def test_oracle_verification_campaign(tmp_path, capsys):
    report_path = tmp_path / "campaign.json"
    t0 = time.perf_counter()
    code = cli.main(
        [
            "verify",
            "--seed", "7",
            "--count", "100",
            "--r-range", "0.5,2",
            "--mu-range", "0,2",
            "--box", "20",
            "--report", str(report_path),
        ]
    )
    elapsed = time.perf_counter() - t0
    capsys.readouterr()
    doc = json.loads(report_path.read_text())
    consistent = doc["aggregate"].get("consistent", 0)
    checks = {
        "exit_code": code == 0,
        "all_consistent": consistent == 100,
        "runtime": elapsed < 600.0,
    }
    ok = all(checks.values())
    _report(
        capsys,
        "oracle verification campaign",
        ok,
        f"{consistent}/100 consistent, exit {code}, {elapsed:.1f} s",
    )
    assert ok, {k: v for k, v in checks.items() if not v} | {
        "aggregate": doc["aggregate"]
    }


def test_invariance_property_suites(capsys):
    rng = np.random.default_rng(20260815)
    n = 1000
    base = [random_instance(rng) for _ in range(n)]
    frames = [
        Configuration(*rng.uniform(-20, 20, 2), rng.uniform(0, 2 * math.pi))
        for _ in range(n)
    ]
    scales = rng.uniform(0.2, 5.0, n)
    bumps = rng.uniform(0.05, 1.0, n)

    base_results = [plan(PlanRequest(s, g, v)) for s, g, v in base]
    failures = {
        "closure": 0,
        "rigid_motion": 0,
        "mirror_swap": 0,
        "scaling": 0,
        "penalty_monotone": 0,
    }

    for result, (s, g, v) in zip(base_results, base):
        tol = result.diagnostics["closure_tol"]
        if any(c.max_error(v.min_radius) > tol for c in result.all_candidates):
            failures["closure"] += 1

    for result, (s, g, v), frame in zip(base_results, base, frames):
        moved = plan(
            PlanRequest(from_canonical(frame, s), from_canonical(frame, g), v)
        )
        c0, c1 = result.best.cost, moved.best.cost
        if abs(c1 - c0) > 1e-8 * max(1.0, c0):
            failures["rigid_motion"] += 1

    for result, (s, g, v) in zip(base_results, base):
        mirrored = plan(
            PlanRequest(
                mirror_configuration(s), mirror_configuration(g), mirror_vehicle(v)
            )
        )
        c0, c1 = result.best.cost, mirrored.best.cost
        if abs(c1 - c0) > 1e-8 * max(1.0, c0):
            failures["mirror_swap"] += 1

    for result, (s, g, v), k in zip(base_results, base, scales):
        scaled = plan(
            PlanRequest(
                Configuration(k * s.x, k * s.y, s.heading),
                Configuration(k * g.x, k * g.y, g.heading),
                VehicleSpec(
                    k * v.radius_left,
                    k * v.radius_right,
                    k * v.penalty_left,
                    k * v.penalty_right,
                ),
            )
        )
        want = k * result.best.cost
        if abs(scaled.best.cost - want) > 1e-8 * max(1.0, want):
            failures["scaling"] += 1

    for result, (s, g, v), d in zip(base_results, base, bumps):
        bumped = plan(
            PlanRequest(
                s,
                g,
                VehicleSpec(
                    v.radius_left,
                    v.radius_right,
                    v.penalty_left + d,
                    v.penalty_right + d,
                ),
            )
        )
        if bumped.best.cost < result.best.cost - 1e-9:
            failures["penalty_monotone"] += 1

    ok = not any(failures.values())
    _report(
        capsys,
        "invariance property suites",
        ok,
        f"{n} cases per suite, violations: " + ", ".join(
            f"{k}={v}" for k, v in failures.items()
        ),
    )
    assert ok, failures
