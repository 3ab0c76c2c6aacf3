"""Command line interface: plan / sample / svg / verify.

Exit codes: 0 success, 1 usage or input error, 2 no path found,
3 verification found an inconsistency.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .families import SolveOptions
from .kinematics import sample_path
from .model import Configuration, VehicleSpec
from .oracle import LatticeOptions, verify_instance
from .planner import MODES, PlanRequest, plan

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_PATH = 2
EXIT_INCONSISTENT = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the CLI contract reserves 2 for no-path
    def error(self, message):
        raise _UsageError(message)


@dataclass(frozen=True)
class Scenario:
    """One planning instance plus a human-readable label."""

    start: Configuration
    goal: Configuration
    spec: VehicleSpec
    label: str = ""


def _parse_pose(text: str, degrees: bool) -> Configuration:
    parts = text.split(",")
    if len(parts) != 3:
        raise _UsageError(f"pose must be x,y,theta - got {text!r}")
    try:
        x, y, th = (float(p) for p in parts)
    except ValueError as exc:
        raise _UsageError(f"bad pose {text!r}: {exc}") from None
    if degrees:
        th = math.radians(th)
    return Configuration(x, y, th)


def _parse_range(text: str, name: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise _UsageError(f"{name} must be lo,hi - got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise _UsageError(f"bad {name} {text!r}: {exc}") from None
    if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
        raise _UsageError(f"{name} must satisfy lo <= hi, got {text!r}")
    return lo, hi


def _add_plan_flags(p: argparse.ArgumentParser):
    p.add_argument("--start", required=True, help="start pose x,y,theta")
    p.add_argument("--goal", required=True, help="goal pose x,y,theta")
    p.add_argument("--rl", type=float, required=True, help="left turn radius, m")
    p.add_argument("--rr", type=float, required=True, help="right turn radius, m")
    p.add_argument("--mul", type=float, default=0.0, help="left turn penalty, m/rad")
    p.add_argument("--mur", type=float, default=0.0, help="right turn penalty, m/rad")
    p.add_argument("--deg", action="store_true", help="angles in flags are degrees")
    p.add_argument("--mode", choices=MODES, default="auto")


def _request_from_args(args) -> PlanRequest:
    start = _parse_pose(args.start, args.deg)
    goal = _parse_pose(args.goal, args.deg)
    try:
        spec = VehicleSpec(args.rl, args.rr, args.mul, args.mur)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    return PlanRequest(start, goal, spec, mode_override=args.mode)


def _segments_json(segments) -> list[dict]:
    out = []
    for seg in segments:
        if seg.measure == 0.0:
            continue
        out.append(
            {
                "kind": seg.kind,
                "measure": seg.measure,
                "measure_unit": "rad" if seg.kind in ("L", "R") else "m",
            }
        )
    return out


def _candidate_json(cand) -> dict:
    return {
        "family": cand.family,
        "segments": _segments_json(cand.segments),
        "cost": cand.cost,
    }


def _plan_document(result, include_candidates: bool) -> dict:
    doc = {
        "mode": result.mode,
        "best": _candidate_json(result.best),
        "residual": list(result.best.residual),
    }
    if include_candidates:
        doc["candidates"] = [_candidate_json(c) for c in result.all_candidates]
    else:
        doc["candidates"] = []
    return doc


def cmd_plan(args) -> int:
    req = _request_from_args(args)
    result = plan(req)
    if result.best is None:
        print("no path found", file=sys.stderr)
        return EXIT_NO_PATH
    doc = _plan_document(result, args.all_candidates)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.json:
        try:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"cannot write {args.json}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sample(args) -> int:
    if not (math.isfinite(args.step) and args.step > 0.0):
        raise _UsageError(f"--step must be positive, got {args.step}")
    req = _request_from_args(args)
    result = plan(req)
    if result.best is None:
        print("no path found", file=sys.stderr)
        return EXIT_NO_PATH
    poly = sample_path(req.start, result.best.segments, req.spec, args.step)
    lines = ["s,x,y,cost"]
    for (x, y), s, c in zip(poly.points, poly.cumulative_length, poly.cumulative_cost):
        lines.append(f"{s:.12g},{x:.12g},{y:.12g},{c:.12g}")
    text = "\n".join(lines) + "\n"
    try:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"cannot write {args.csv}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _svg_pose_glyph(c: Configuration, size: float, color: str) -> str:
    # arrowhead triangle pointing along the heading, y flipped for svg
    ca, sa = math.cos(c.heading), math.sin(c.heading)
    tip = (c.x + size * ca, c.y + size * sa)
    left = (c.x - 0.35 * size * sa, c.y + 0.35 * size * ca)
    right = (c.x + 0.35 * size * sa, c.y - 0.35 * size * ca)
    pts = " ".join(f"{x:.6f},{-y:.6f}" for x, y in (tip, left, right))
    return f'<polygon points="{pts}" fill="{color}"/>'


def _svg_polyline(points, style: str) -> str:
    pts = " ".join(f"{x:.6f},{-y:.6f}" for x, y in points)
    return f'<polyline points="{pts}" {style}/>'


def cmd_svg(args) -> int:
    req = _request_from_args(args)
    result = plan(req)
    if result.best is None:
        print("no path found", file=sys.stderr)
        return EXIT_NO_PATH
    step = 0.02 * req.spec.min_radius
    poly = sample_path(req.start, result.best.segments, req.spec, step)
    layers = [
        _svg_polyline(
            poly.points, 'fill="none" stroke="#1f77b4" stroke-width="0.6%"'
        )
    ]
    all_pts = list(poly.points)
    if args.compare_classical:
        classical = plan(
            PlanRequest(req.start, req.goal, req.spec, mode_override="classical")
        )
        if classical.best is not None:
            cpoly = sample_path(req.start, classical.best.segments, req.spec, step)
            layers.append(
                _svg_polyline(
                    cpoly.points,
                    'fill="none" stroke="#d62728" stroke-width="0.45%" '
                    'stroke-dasharray="2,1.2"',
                )
            )
            all_pts.extend(cpoly.points)
    glyph = 0.6 * req.spec.min_radius
    layers.append(_svg_pose_glyph(req.start, glyph, "#2ca02c"))
    layers.append(_svg_pose_glyph(req.goal, glyph, "#9467bd"))
    for c in (req.start, req.goal):
        all_pts.append((c.x - glyph, c.y - glyph))
        all_pts.append((c.x + glyph, c.y + glyph))

    xs = [p[0] for p in all_pts]
    ys = [-p[1] for p in all_pts]
    pad = 0.08 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    vb = (
        min(xs) - pad,
        min(ys) - pad,
        (max(xs) - min(xs)) + 2 * pad,
        (max(ys) - min(ys)) + 2 * pad,
    )
    body = "\n  ".join(layers)
    text = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{vb[0]:.6f} {vb[1]:.6f} {vb[2]:.6f} {vb[3]:.6f}" '
        f'width="640" height="640">\n  {body}\n</svg>\n'
    )
    try:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"cannot write {args.svg}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def generate_scenarios(seed: int, count: int, r_range, mu_range, box: float):
    """Seeded random verification scenarios: start at the origin pose,
    goal uniform in a box of the given side length centered on it."""
    rng = np.random.default_rng(seed)
    out = []
    half = 0.5 * box
    for i in range(count):
        rl, rr = rng.uniform(r_range[0], r_range[1], 2)
        mul, mur = rng.uniform(mu_range[0], mu_range[1], 2)
        gx, gy = rng.uniform(-half, half, 2)
        gth = rng.uniform(0.0, 2.0 * math.pi)
        out.append(
            Scenario(
                Configuration(0.0, 0.0, 0.0),
                Configuration(gx, gy, gth),
                VehicleSpec(rl, rr, mul, mur),
                label=f"seed{seed}-{i}",
            )
        )
    return out


def _verify_one(sc: Scenario) -> dict:
    rep = verify_instance(sc.start, sc.goal, sc.spec)
    return {
        "label": sc.label,
        "start": [sc.start.x, sc.start.y, sc.start.heading],
        "goal": [sc.goal.x, sc.goal.y, sc.goal.heading],
        "radius_left": sc.spec.radius_left,
        "radius_right": sc.spec.radius_right,
        "penalty_left": sc.spec.penalty_left,
        "penalty_right": sc.spec.penalty_right,
        "planner_cost": rep.planner_cost,
        "planner_family": rep.planner_family,
        "lattice_cost": rep.lattice_cost,
        "free_structure_cost": rep.free_structure_cost,
        "best_free_sequence": rep.best_free_sequence,
        "verdict": rep.verdict,
    }


def cmd_verify(args) -> int:
    if args.count < 0:
        raise _UsageError(f"--count must be non-negative, got {args.count}")
    if args.box <= 0:
        raise _UsageError(f"--box must be positive, got {args.box}")
    r_range = _parse_range(args.r_range, "--r-range")
    mu_range = _parse_range(args.mu_range, "--mu-range")
    if r_range[0] <= 0:
        raise _UsageError("--r-range lower bound must be positive")
    if mu_range[0] < 0:
        raise _UsageError("--mu-range lower bound must be non-negative")
    scenarios = generate_scenarios(args.seed, args.count, r_range, mu_range, args.box)

    threads = _thread_cap()
    if threads > 1 and len(scenarios) > 1:
        import multiprocessing

        with multiprocessing.get_context("fork").Pool(threads) as pool:
            rows = pool.map(_verify_one, scenarios)
    else:
        rows = [_verify_one(sc) for sc in scenarios]

    counts: dict[str, int] = {}
    for row in rows:
        counts[row["verdict"]] = counts.get(row["verdict"], 0) + 1
    report = {
        "seed": args.seed,
        "count": args.count,
        "r_range": list(r_range),
        "mu_range": list(mu_range),
        "box": args.box,
        "instances": rows,
        "aggregate": counts,
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.report:
        try:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"cannot write {args.report}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    ok = counts.get("consistent", 0) == len(rows)
    return EXIT_OK if ok else EXIT_INCONSISTENT


def _thread_cap() -> int:
    raw = os.environ.get("WMD_THREADS", "")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def _build_parser() -> _Parser:
    parser = _Parser(prog="wmdubins", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan one instance, emit JSON")
    _add_plan_flags(p)
    p.add_argument("--json", default="", help="write JSON here instead of stdout")
    p.add_argument("--all-candidates", action="store_true")
    p.set_defaults(fn=cmd_plan)

    p = sub.add_parser("sample", help="plan and export a CSV polyline")
    _add_plan_flags(p)
    p.add_argument("--step", type=float, required=True, help="max spacing, m")
    p.add_argument("--csv", required=True, help="output CSV path")
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("svg", help="plan and render an SVG")
    _add_plan_flags(p)
    p.add_argument("--svg", required=True, help="output SVG path")
    p.add_argument("--compare-classical", action="store_true")
    p.set_defaults(fn=cmd_svg)

    p = sub.add_parser("verify", help="random oracle verification campaign")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--r-range", default="0.5,2.0")
    p.add_argument("--mu-range", default="0.0,2.0")
    p.add_argument("--box", type=float, default=20.0)
    p.add_argument("--report", default="", help="write the JSON report here")
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
