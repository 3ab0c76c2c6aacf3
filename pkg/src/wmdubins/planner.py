"""Candidate enumeration across all families and minimum-cost selection.

Weighted mode evaluates the full 21-family set; classical mode (both turn
penalties zero) evaluates single/double segments, CSC, and the turn-turn-turn
families instead. Solutions are found in the canonical frame; segment
measures are frame-independent, so candidates transfer to the world frame
as-is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import (
    Configuration,
    PathCandidate,
    PlanResult,
    Segment,
    VehicleSpec,
    ZERO_MEASURE,
    normalize_angle,
    to_canonical,
    wrap_to_pi,
)
from .kinematics import closure_residual
from .families import (
    CSC_FAMILIES,
    FIVE_SEGMENT_FAMILIES,
    FOUR_SEGMENT_FAMILIES,
    ORIGIN,
    SCS_FAMILIES,
    SolveOptions,
    TOL_ANGLE,
    WEIGHTED_FAMILIES,
    _finish,
    effective_closure_tol,
    solve_csc,
    solve_four_segment,
    solve_five_segment,
    solve_one_segment,
    solve_scs,
    solve_two_segment,
)

CCC_FAMILIES = ("LRL", "RLR")

MODES = ("auto", "weighted", "classical")


@dataclass
class PlanRequest:
    start: Configuration
    goal: Configuration
    spec: VehicleSpec
    options: SolveOptions = field(default_factory=SolveOptions)
    mode_override: str = "auto"

    def __post_init__(self):
        if self.mode_override not in MODES:
            raise ValueError(f"mode_override must be one of {MODES}, got {self.mode_override!r}")


def solve_ccc(
    family: str,
    goal: Configuration,
    spec: VehicleSpec,
    opts: SolveOptions,
    stats: dict | None = None,
) -> list[PathCandidate]:
    """Turn-turn-turn candidates for classical mode.

    The middle circle is tangent to both boundary circles; its center sits at
    distance r_L + r_R from each, giving two apex choices. Only middle arcs
    above pi are kept.
    """
    if family not in CCC_FAMILIES:
        raise ValueError(f"unknown CCC family {family!r}")
    tol = effective_closure_tol(goal, opts)
    rl, rr = spec.radius_left, spec.radius_right
    a = goal.heading
    ca, sa = math.cos(a), math.sin(a)
    k = rl + rr

    if family == "LRL":
        c1 = (0.0, rl)
        c3 = (goal.x - rl * sa, goal.y + rl * ca)
    else:
        c1 = (0.0, -rr)
        c3 = (goal.x + rr * sa, goal.y - rr * ca)
    wx, wy = c3[0] - c1[0], c3[1] - c1[1]
    d = math.hypot(wx, wy)
    if d > 2.0 * k or d < 1e-12:
        return []
    chi = math.atan2(wy, wx)
    beta = math.acos(min(max(d / (2.0 * k), -1.0), 1.0))

    out = []
    for sgn in (1.0, -1.0):
        theta = chi + sgn * beta
        c2 = (c1[0] + k * math.cos(theta), c1[1] + k * math.sin(theta))
        if family == "LRL":
            phi1 = normalize_angle(theta - math.atan2(0.0 - c1[1], 0.0 - c1[0]))
            phi2 = normalize_angle(
                math.atan2(c1[1] - c2[1], c1[0] - c2[0])
                - math.atan2(c3[1] - c2[1], c3[0] - c2[0])
            )
            phi3 = normalize_angle(
                math.atan2(goal.y - c3[1], goal.x - c3[0])
                - math.atan2(c2[1] - c3[1], c2[0] - c3[0])
            )
        else:
            phi1 = normalize_angle(math.atan2(0.0 - c1[1], 0.0 - c1[0]) - theta)
            phi2 = normalize_angle(
                math.atan2(c3[1] - c2[1], c3[0] - c2[0])
                - math.atan2(c1[1] - c2[1], c1[0] - c2[0])
            )
            phi3 = normalize_angle(
                math.atan2(c2[1] - c3[1], c2[0] - c3[0])
                - math.atan2(goal.y - c3[1], goal.x - c3[0])
            )
        if phi2 <= math.pi - TOL_ANGLE:
            continue
        cand = _finish(family, (phi1, phi2, phi3), goal, spec, tol)
        if cand is not None:
            out.append(cand)
    return out


def _resolve_mode(spec: VehicleSpec, override: str) -> str:
    if override == "auto":
        return "classical" if spec.is_classical else "weighted"
    return override


def _solve_families(
    mode: str,
    goal: Configuration,
    spec: VehicleSpec,
    opts: SolveOptions,
    diagnostics: dict,
) -> list[PathCandidate]:
    candidates: list[PathCandidate] = []
    counts: dict[str, int] = {}
    solver_stats: dict[str, dict] = {}

    def run(label, fn, *args):
        stats: dict = {}
        found = fn(*args, opts, stats)
        counts[label] = len(found)
        if stats:
            solver_stats[label] = stats
        candidates.extend(found)

    run("single", solve_one_segment, goal, spec)
    run("double", solve_two_segment, goal, spec)
    for fam in CSC_FAMILIES:
        run(fam, solve_csc, fam, goal, spec)
    if mode == "weighted":
        for fam in SCS_FAMILIES:
            run(fam, solve_scs, fam, goal, spec)
        for fam in FOUR_SEGMENT_FAMILIES:
            run(fam, solve_four_segment, fam, goal, spec)
        for fam in FIVE_SEGMENT_FAMILIES:
            run(fam, solve_five_segment, fam, goal, spec)
    else:
        for fam in CCC_FAMILIES:
            run(fam, solve_ccc, fam, goal, spec)

    diagnostics["family_candidates"] = counts
    diagnostics["solver_stats"] = solver_stats
    return candidates


def _select_best(candidates: list[PathCandidate]) -> PathCandidate | None:
    if not candidates:
        return None
    # Deterministic regardless of assembly order: sort by family then params,
    # pick minimum cost with fewer active segments breaking ties.
    ordered = sorted(
        candidates, key=lambda c: (c.family, c.cost, tuple(s.measure for s in c.segments))
    )
    return min(ordered, key=lambda c: (c.cost, c.active_segment_count(), c.family))


def _collapse_word(segments) -> tuple[str, list[float]]:
    """Merge adjacent same-kind runs and drop degenerate segments."""
    word = ""
    measures: list[float] = []
    for seg in segments:
        if seg.measure <= ZERO_MEASURE:
            continue
        if word and word[-1] == seg.kind:
            measures[-1] += seg.measure
        else:
            word += seg.kind
            measures.append(seg.measure)
    return word, measures


def _lattice_assisted(
    req: PlanRequest, goal_c: Configuration, opts: SolveOptions
) -> list[PathCandidate]:
    """Last-resort retry: seed a free-structure refinement from a coarse
    lattice path. Expected unreachable; kept for robustness."""
    from . import oracle  # deferred: oracle imports this module

    lopts = oracle.LatticeOptions(
        heading_bins=36, xy_resolution=0.1 * req.spec.min_radius
    )
    cost, segments = oracle.lattice_search(req.start, req.goal, req.spec, lopts)
    if not math.isfinite(cost):
        return []
    word, _ = _collapse_word(segments)
    if not word or len(word) > 5 or word not in WEIGHTED_FAMILIES:
        return []
    refined = oracle.free_structure_solve(word, req.start, req.goal, req.spec, opts)
    if refined is None:
        return []
    _, segs = refined
    tol = effective_closure_tol(goal_c, opts)
    cand = _finish(word, [s.measure for s in segs], goal_c, req.spec, tol)
    return [cand] if cand is not None else []


def plan(req: PlanRequest) -> PlanResult:
    """Solve every candidate family and return the cheapest feasible path."""
    opts = req.options
    spec = req.spec
    mode = _resolve_mode(spec, req.mode_override)
    goal_c = to_canonical(req.start, req.goal)
    tol = effective_closure_tol(goal_c, opts)
    diagnostics: dict = {
        "mode": mode,
        "closure_tol": tol,
        "lambda_grid": opts.lambda_grid,
        "angle_grid": opts.angle_grid,
        "retries": 0,
    }

    # Start equals goal: the empty path wins outright.
    if (
        math.hypot(goal_c.x, goal_c.y) <= tol
        and spec.min_radius * abs(wrap_to_pi(goal_c.heading)) <= tol
    ):
        seg = Segment("S", 0.0)
        cand = PathCandidate(
            "S", (seg,), 0.0, closure_residual(ORIGIN, goal_c, (seg,), spec)
        )
        diagnostics["family_candidates"] = {"single": 1}
        return PlanResult(best=cand, all_candidates=[cand], mode=mode, diagnostics=diagnostics)

    candidates = _solve_families(mode, goal_c, spec, opts, diagnostics)

    if not candidates:
        for factor in (4, 16):
            diagnostics["retries"] += 1
            wide = SolveOptions(
                lambda_grid=opts.lambda_grid * factor,
                angle_grid=opts.angle_grid * factor,
                max_iters=opts.max_iters,
                tol_root=opts.tol_root,
                tol_closure=opts.tol_closure,
            )
            candidates = _solve_families(mode, goal_c, spec, wide, diagnostics)
            if candidates:
                break
    if not candidates and mode == "weighted":
        diagnostics["retries"] += 1
        candidates = _lattice_assisted(req, goal_c, opts)

    best = _select_best(candidates)
    ordered = sorted(
        candidates, key=lambda c: (c.cost, c.active_segment_count(), c.family)
    )
    return PlanResult(best=best, all_candidates=ordered, mode=mode, diagnostics=diagnostics)


def cost_monotonicity_probe(req: PlanRequest, delta_mu: float) -> tuple[float, float]:
    """Optimal costs at the request's penalties and at penalties + delta_mu."""
    if not (math.isfinite(delta_mu) and delta_mu >= 0.0):
        raise ValueError(f"delta_mu must be >= 0, got {delta_mu!r}")
    low = plan(req)
    bumped = VehicleSpec(
        radius_left=req.spec.radius_left,
        radius_right=req.spec.radius_right,
        penalty_left=req.spec.penalty_left + delta_mu,
        penalty_right=req.spec.penalty_right + delta_mu,
    )
    high = plan(
        PlanRequest(
            start=req.start,
            goal=req.goal,
            spec=bumped,
            options=req.options,
            mode_override=req.mode_override,
        )
    )
    if low.best is None or high.best is None:
        raise RuntimeError("no feasible path for monotonicity probe")
    return (low.best.cost, high.best.cost)
