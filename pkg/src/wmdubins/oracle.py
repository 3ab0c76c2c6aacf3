"""Independent verification oracles for the planner.

Three cross-checks that share as little machinery with the planner as
possible:

* lattice_search: discretized search over quantized poses with true
  weighted edge costs; returns a certified upper bound on the optimal cost.
* free_structure_solve: treats every segment measure of a given kind word
  as a free unknown and solves the endpoint closure by seeded multi-start
  Gauss-Newton, with a constrained cost-descent polish for words long
  enough to have root manifolds.
* classical_dubins: a self-contained zero-penalty reference built on
  complex-number circle geometry.

verify_instance combines them into a verdict for one planning instance.
"""

from __future__ import annotations

import cmath
import hashlib
import math
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import _lattice_py
from .families import SolveOptions
from .kinematics import coded_cost_rates, cost_vector, propagate_coded_jacobian
from .model import TAU, Configuration, Segment, VehicleSpec, to_canonical
from .planner import PlanRequest, plan

try:
    from . import _lattice as _lattice_ext
except ImportError:  # extension not built; pure-Python kernel still works
    _lattice_ext = None

HAVE_COMPILED_LATTICE = _lattice_ext is not None

FREE_RESTARTS = 32
_KIND_TO_CODE = {"L": 0, "R": 1, "S": 2}
_CODE_TO_KIND = "LRS"

VERDICT_CONSISTENT = "consistent"
VERDICT_PLANNER_BEATS = "planner_beats_oracle"
VERDICT_ORACLE_BEATS = "oracle_beats_planner"
VERDICT_INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LatticeOptions:
    """Knobs for lattice_search.

    xy_resolution, box_margin and the goal tolerances default from the
    vehicle (0.05 * min radius, 4 * (r_l + r_r), one cell / half a heading
    bin) when left as None. cost_slack / cost_slack_rel define the
    allowance used by verify_instance: planner cost may exceed the lattice
    bound by at most cost_slack + cost_slack_rel * planner_cost.
    """

    heading_bins: int = 72
    xy_resolution: float | None = None
    control_set: tuple[tuple[str, float], ...] | None = None
    cost_slack: float = 0.1
    cost_slack_rel: float = 0.03
    box_margin: float | None = None
    max_nodes: int = 3_000_000
    analytic_completion: bool = True
    goal_xy_tol: float | None = None
    goal_heading_tol: float | None = None
    backend: str = "auto"

    def __post_init__(self):
        if self.heading_bins < 36:
            raise ValueError(f"heading_bins must be >= 36, got {self.heading_bins}")
        for name in ("xy_resolution", "box_margin", "goal_xy_tol", "goal_heading_tol"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be positive, got {v!r}")
        if self.cost_slack < 0.0 or self.cost_slack_rel < 0.0:
            raise ValueError("cost slack terms must be non-negative")
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be positive")
        if self.backend not in ("auto", "compiled", "python"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.control_set is not None:
            for kind, quantum in self.control_set:
                if kind not in _KIND_TO_CODE:
                    raise ValueError(f"bad control kind {kind!r}")
                if not (math.isfinite(quantum) and quantum > 0.0):
                    raise ValueError(f"bad control quantum {quantum!r}")

    def slack_for(self, planner_cost: float) -> float:
        return self.cost_slack + self.cost_slack_rel * planner_cost


@dataclass(frozen=True)
class OracleReport:
    """Outcome of verify_instance for one planning instance."""

    planner_cost: float
    lattice_cost: float
    free_structure_cost: float
    best_free_sequence: str
    verdict: str
    planner_family: str = ""
    details: dict = field(default_factory=dict, compare=False)


def _kernel(backend: str):
    if backend == "compiled":
        if _lattice_ext is None:
            raise RuntimeError("compiled lattice kernel is not available")
        return _lattice_ext
    if backend == "python":
        return _lattice_py
    return _lattice_ext if _lattice_ext is not None else _lattice_py


def lattice_search(
    start: Configuration,
    goal: Configuration,
    spec: VehicleSpec,
    options: LatticeOptions | None = None,
    stats: dict | None = None,
):
    """Upper-bound cost via search over quantized poses.

    Returns (cost, segments); (inf, ()) when the goal cannot be met within
    the state bound (tolerance-goal mode only; the default analytic
    completion always produces a finite bound).
    """
    opts = options if options is not None else LatticeOptions()
    g = to_canonical(start, goal)
    res = opts.xy_resolution if opts.xy_resolution is not None else 0.05 * spec.min_radius
    hbin = TAU / opts.heading_bins
    control = opts.control_set
    if control is None:
        control = (("L", hbin), ("R", hbin), ("S", res))
    margin = opts.box_margin
    if margin is None:
        margin = 4.0 * (spec.radius_left + spec.radius_right)
    xmin = min(0.0, g.x) - margin
    xmax = max(0.0, g.x) + margin
    ymin = min(0.0, g.y) - margin
    ymax = max(0.0, g.y) + margin
    goal_xy = opts.goal_xy_tol if opts.goal_xy_tol is not None else res
    goal_th = opts.goal_heading_tol
    if goal_th is None:
        goal_th = math.pi / opts.heading_bins

    kernel = _kernel(opts.backend)
    prim_kinds = [_KIND_TO_CODE[k] for k, _ in control]
    prim_measures = [q for _, q in control]
    status, cost, prefix, tail, kstats = kernel.run_search(
        g.x,
        g.y,
        g.heading,
        spec.radius_left,
        spec.radius_right,
        spec.penalty_left,
        spec.penalty_right,
        prim_kinds,
        prim_measures,
        xmin,
        xmax,
        ymin,
        ymax,
        res,
        opts.heading_bins,
        opts.max_nodes,
        opts.analytic_completion,
        goal_xy,
        goal_th,
    )
    if stats is not None:
        stats.update(kstats)
        stats["status"] = status
        stats["backend"] = "compiled" if kernel is _lattice_ext else "python"
    if not math.isfinite(cost):
        return math.inf, ()

    pairs = [(control[pid][0], control[pid][1]) for pid in prefix]
    pairs.extend(tail)
    merged: list[list] = []
    for kind, measure in pairs:
        if measure <= 0.0:
            continue
        if merged and merged[-1][0] == kind:
            merged[-1][1] += measure
        else:
            merged.append([kind, measure])
    segments = tuple(Segment(kind, measure) for kind, measure in merged)
    return cost, segments


def enumerate_sequences(max_segments: int) -> list[str]:
    """All kind words over {L, R, S} up to max_segments with no repeats.

    Adjacent equal kinds would merge into one segment, so they are skipped.
    Ordered by length, then generation order over the L, R, S alphabet.
    """
    if not 1 <= max_segments <= 6:
        raise ValueError(f"max_segments must be in [1, 6], got {max_segments}")
    out: list[str] = []
    layer = [""]
    for _ in range(max_segments):
        nxt = []
        for prefix in layer:
            for kind in "LRS":
                if prefix and prefix[-1] == kind:
                    continue
                nxt.append(prefix + kind)
        out.extend(nxt)
        layer = nxt
    return out


def _sequence_seed(sequence: str, g: Configuration, spec: VehicleSpec) -> int:
    blob = struct.pack(
        "<7d",
        g.x,
        g.y,
        g.heading,
        spec.radius_left,
        spec.radius_right,
        spec.penalty_left,
        spec.penalty_right,
    ) + sequence.encode("ascii")
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "little")


def _initial_measures(sequence: str, g: Configuration, spec: VehicleSpec, restarts: int):
    rng = np.random.default_rng(_sequence_seed(sequence, g, spec))
    n = len(sequence)
    m0 = np.empty((restarts, n))
    span = math.hypot(g.x, g.y) + 2.0 * (spec.radius_left + spec.radius_right) + 1.0
    for k, kind in enumerate(sequence):
        if kind == "S":
            m0[:, k] = rng.uniform(0.0, span, restarts)
        else:
            m0[:, k] = rng.uniform(0.0, TAU, restarts)
    return m0


def _closure(codes, measures, g: Configuration, spec: VehicleSpec, w: float):
    x, y, h, jx, jy, hsign = propagate_coded_jacobian(codes, measures, spec)
    dh = h - g.heading
    half = 0.5 * dh
    f = np.stack([x - g.x, y - g.y, 2.0 * w * np.sin(half)], axis=-1)
    jh = (w * np.cos(half))[..., None] * hsign
    jac = np.stack([jx, jy, jh], axis=-2)
    return f, jac


def _newton_roots(codes, m0, g, spec, max_iters=50):
    """Batched projected Gauss-Newton onto the closure manifold.

    codes/m0 have shape (..., n). Underdetermined systems take the
    minimum-norm step. Returns (measures, residual) with arcs folded into
    [0, 2pi); callers filter by residual.
    """
    w = spec.min_radius
    m = np.array(m0, dtype=float)
    arc_mask = codes != 2

    f, jac = _closure(codes, m, g, spec, w)
    fn = np.linalg.norm(f, axis=-1)
    eye = np.eye(3)
    for _ in range(max_iters):
        jjt = np.einsum("...ik,...jk->...ij", jac, jac)
        lam = np.linalg.solve(jjt + 1e-12 * eye, -f[..., None])[..., 0]
        step = np.einsum("...ik,...i->...k", jac, lam)
        np.clip(step, -10.0, 10.0, out=step)

        m_try = np.maximum(m + step, 0.0)
        f_try, jac_try = _closure(codes, m_try, g, spec, w)
        fn_try = np.linalg.norm(f_try, axis=-1)
        worse = fn_try > fn
        if np.any(worse):
            m_damp = np.maximum(m + 0.25 * step, 0.0)
            f_damp, jac_damp = _closure(codes, m_damp, g, spec, w)
            fn_damp = np.linalg.norm(f_damp, axis=-1)
            use = worse & (fn_damp < fn_try)
            u = use[..., None]
            m_try = np.where(u, m_damp, m_try)
            f_try = np.where(u, f_damp, f_try)
            jac_try = np.where(use[..., None, None], jac_damp, jac_try)
            fn_try = np.where(use, fn_damp, fn_try)
        m, f, jac, fn = m_try, f_try, jac_try, fn_try
        if np.all(fn <= 1e-13):
            break

    m = np.where(arc_mask, np.mod(m, TAU), m)
    x, y, h = _coded_endpoint(codes, m, spec)
    dh = h - g.heading
    resid = np.sqrt(
        (x - g.x) ** 2 + (y - g.y) ** 2 + (2.0 * w * np.sin(0.5 * dh)) ** 2
    )
    return m, resid


def _coded_endpoint(codes, measures, spec: VehicleSpec):
    x, y, h, _, _, _ = propagate_coded_jacobian(codes, measures, spec)
    return x, y, h


def _polish_min_cost(sequence: str, m0, g: Configuration, spec: VehicleSpec):
    """Slide along the root manifold to the cheapest point (SLSQP).

    The cost is linear in the measures, so only the closure constraint is
    nonlinear. Returns (cost, measures) or None.
    """
    rates = cost_vector(sequence, spec)
    codes = np.array([_KIND_TO_CODE[k] for k in sequence], dtype=np.int8)
    w = spec.min_radius

    def cons_f(m):
        f, _ = _closure(codes, m, g, spec, w)
        return f

    def cons_j(m):
        _, jac = _closure(codes, m, g, spec, w)
        return jac

    bounds = [(0.0, TAU) if k in "LR" else (0.0, None) for k in sequence]
    try:
        res = minimize(
            lambda m: float(rates @ m),
            np.asarray(m0, dtype=float),
            jac=lambda m: rates,
            method="SLSQP",
            bounds=bounds,
            constraints=[{"type": "eq", "fun": cons_f, "jac": cons_j}],
            options={"maxiter": 150, "ftol": 1e-12},
        )
    except (ValueError, np.linalg.LinAlgError):
        return None
    m = np.maximum(res.x, 0.0)
    f, _ = _closure(codes, m, g, spec, w)
    tol = 1e-9 * max(1.0, math.hypot(g.x, g.y))
    if np.linalg.norm(f) > tol:
        return None
    return float(rates @ m), m


def _roots_for_sequence(sequence, g, spec, restarts, max_iters):
    codes = np.array([_KIND_TO_CODE[k] for k in sequence], dtype=np.int8)
    m0 = _initial_measures(sequence, g, spec, restarts)
    m, resid = _newton_roots(codes[None, :], m0, g, spec, max_iters)
    tol = 1e-9 * max(1.0, math.hypot(g.x, g.y))
    ok = resid <= tol
    if not np.any(ok):
        return np.empty((0, len(sequence))), np.empty(0)
    m = m[ok]
    rates = cost_vector(sequence, spec)
    costs = m @ rates
    # dedup on rounded measures, keep ascending cost
    order = np.argsort(costs, kind="stable")
    m = m[order]
    costs = costs[order]
    keys = np.round(m / 1e-6).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    first.sort()
    return m[first], costs[first]


def free_structure_solve(
    sequence: str,
    start: Configuration,
    goal: Configuration,
    spec: VehicleSpec,
    opts: SolveOptions | None = None,
    restarts: int = FREE_RESTARTS,
    polish_starts: int = 2,
):
    """Cheapest closure root of a kind word with all measures free.

    Multi-start Gauss-Newton from a per-(instance, sequence) seeded draw;
    for words of 4+ segments the closure roots form manifolds, so the
    cheapest distinct roots are polished by constrained cost descent.
    Returns (cost, segments) or None if no root is found.
    """
    if not sequence or any(k not in _KIND_TO_CODE for k in sequence):
        raise ValueError(f"bad sequence {sequence!r}")
    if any(a == b for a, b in zip(sequence, sequence[1:])):
        raise ValueError(f"sequence has adjacent repeats: {sequence!r}")
    o = opts if opts is not None else SolveOptions()
    g = to_canonical(start, goal)
    roots, costs = _roots_for_sequence(sequence, g, spec, restarts, o.max_iters)
    if roots.shape[0] == 0:
        return None
    best_cost = float(costs[0])
    best_m = roots[0]
    if len(sequence) >= 4:
        for i in range(min(polish_starts, roots.shape[0])):
            polished = _polish_min_cost(sequence, roots[i], g, spec)
            if polished is not None and polished[0] < best_cost:
                best_cost, best_m = polished
    segments = tuple(Segment(k, float(v)) for k, v in zip(sequence, best_m))
    return best_cost, segments


def _free_structure_sweep(g, spec, max_iters, restarts, polish_starts):
    """Best free-structure cost over every word of up to five segments.

    Words of equal length share one batched Newton solve; manifold words
    (4-5 segments) get a cost-descent polish from their cheapest roots.
    Returns (cost, sequence, measures) with cost = inf if nothing closed.
    """
    sequences = enumerate_sequences(5)
    by_len: dict[int, list[str]] = {}
    for s in sequences:
        by_len.setdefault(len(s), []).append(s)

    tol = 1e-9 * max(1.0, math.hypot(g.x, g.y))
    best_cost = math.inf
    best_seq = ""
    best_m = None

    for n, seqs in sorted(by_len.items()):
        codes = np.array(
            [[_KIND_TO_CODE[k] for k in s] for s in seqs], dtype=np.int8
        )
        m0 = np.stack([_initial_measures(s, g, spec, restarts) for s in seqs])
        m, resid = _newton_roots(codes[:, None, :], m0, g, spec, max_iters)
        rates = coded_cost_rates(codes, spec)
        costs = np.einsum("sbk,sk->sb", m, rates)
        ok = resid <= tol
        for si, s in enumerate(seqs):
            if not np.any(ok[si]):
                continue
            ms = m[si][ok[si]]
            cs = costs[si][ok[si]]
            order = np.argsort(cs, kind="stable")
            ms = ms[order]
            cs = cs[order]
            keys = np.round(ms / 1e-6).astype(np.int64)
            _, first = np.unique(keys, axis=0, return_index=True)
            first.sort()
            ms = ms[first]
            cs = cs[first]
            top_cost = float(cs[0])
            top_m = ms[0]
            if n >= 4:
                for i in range(min(polish_starts, ms.shape[0])):
                    polished = _polish_min_cost(s, ms[i], g, spec)
                    if polished is not None and polished[0] < top_cost:
                        top_cost, top_m = polished
            if top_cost < best_cost - 1e-12:
                best_cost = top_cost
                best_seq = s
                best_m = top_m
    return best_cost, best_seq, best_m


def verify_instance(
    start: Configuration,
    goal: Configuration,
    spec: VehicleSpec,
    opts: SolveOptions | None = None,
    lopts: LatticeOptions | None = None,
) -> OracleReport:
    """Cross-check the planner against the lattice and free-structure oracles.

    consistent requires both: planner_cost <= lattice_cost + slack, and
    |planner_cost - free_structure_cost| <= 1e-6 * max(1, planner_cost).
    """
    o = opts if opts is not None else SolveOptions()
    lo = lopts if lopts is not None else LatticeOptions()

    result = plan(PlanRequest(start, goal, spec, options=o))
    if result.best is None:
        return OracleReport(
            planner_cost=math.inf,
            lattice_cost=math.inf,
            free_structure_cost=math.inf,
            best_free_sequence="",
            verdict=VERDICT_INFEASIBLE,
            details={"planner": "no-path"},
        )
    planner_cost = result.best.cost
    planner_family = result.best.family

    lattice_stats: dict = {}
    lattice_cost, _lattice_segments = lattice_search(
        start, goal, spec, lo, stats=lattice_stats
    )

    g = to_canonical(start, goal)
    free_cost, free_seq, _ = _free_structure_sweep(
        g, spec, o.max_iters, FREE_RESTARTS, polish_starts=2
    )
    eq_tol = 1e-6 * max(1.0, planner_cost)
    if planner_cost < free_cost - eq_tol:
        # the sweep may have missed a basin; retry harder before flagging
        free_cost2, free_seq2, _ = _free_structure_sweep(
            g, spec, o.max_iters, FREE_RESTARTS * 8, polish_starts=6
        )
        if free_cost2 < free_cost:
            free_cost, free_seq = free_cost2, free_seq2

    slack = lo.slack_for(planner_cost)
    if not math.isfinite(free_cost):
        verdict = VERDICT_PLANNER_BEATS
    elif planner_cost < free_cost - eq_tol:
        verdict = VERDICT_PLANNER_BEATS
    elif planner_cost > free_cost + eq_tol:
        verdict = VERDICT_ORACLE_BEATS
    elif math.isfinite(lattice_cost) and planner_cost > lattice_cost + slack:
        verdict = VERDICT_ORACLE_BEATS
    else:
        verdict = VERDICT_CONSISTENT

    return OracleReport(
        planner_cost=planner_cost,
        lattice_cost=lattice_cost,
        free_structure_cost=free_cost,
        best_free_sequence=free_seq,
        verdict=verdict,
        planner_family=planner_family,
        details={
            "lattice": lattice_stats,
            "planner_mode": result.mode,
        },
    )


def _cis(a: float) -> complex:
    return complex(math.cos(a), math.sin(a))


def _mod2pi(a: float) -> float:
    a = math.fmod(a, TAU)
    if a < 0.0:
        a += TAU
    if a >= TAU:  # adding 2*pi to a tiny negative can round right back up
        a = 0.0
    return a


def classical_dubins(
    start: Configuration, goal: Configuration, r_l: float, r_r: float
):
    """Zero-penalty reference: min length over the six classical words.

    Independent of the planner's constructions: circle centers and tangent
    directions are handled as complex numbers. Returns (cost, segments).
    """
    if not (r_l > 0.0 and r_r > 0.0):
        raise ValueError("radii must be positive")
    z0 = complex(start.x, start.y)
    z1 = complex(goal.x, goal.y)
    th0 = start.heading
    th1 = goal.heading
    u0 = _cis(th0)
    # turn centers: left is 90 deg CCW of the heading, right 90 deg CW
    il0 = z0 + 1j * r_l * u0
    ir0 = z0 - 1j * r_r * u0
    u1 = _cis(th1)
    il1 = z1 + 1j * r_l * u1
    ir1 = z1 - 1j * r_r * u1
    k = r_l + r_r

    cands: list[tuple[float, tuple[Segment, ...]]] = []

    # LSL / RSR: outer tangent parallel to the center-to-center chord
    w = il1 - il0
    if w == 0:
        t = _mod2pi(th1 - th0)
        cands.append((r_l * t, (Segment("L", t),)))
    else:
        chi = cmath.phase(w)
        t = _mod2pi(chi - th0)
        q = _mod2pi(th1 - chi)
        p = abs(w)
        cands.append(
            (r_l * (t + q) + p, (Segment("L", t), Segment("S", p), Segment("L", q)))
        )

    w = ir1 - ir0
    if w == 0:
        t = _mod2pi(th0 - th1)
        cands.append((r_r * t, (Segment("R", t),)))
    else:
        chi = cmath.phase(w)
        t = _mod2pi(th0 - chi)
        q = _mod2pi(chi - th1)
        p = abs(w)
        cands.append(
            (r_r * (t + q) + p, (Segment("R", t), Segment("S", p), Segment("R", q)))
        )

    # LSR / RSL: inner tangent, exists once centers are k apart
    w = ir1 - il0
    d = abs(w)
    if d >= k:
        p = math.sqrt(d * d - k * k)
        chi = cmath.phase(w) + math.atan2(k, p)
        t = _mod2pi(chi - th0)
        q = _mod2pi(chi - th1)
        cands.append(
            (r_l * t + r_r * q + p, (Segment("L", t), Segment("S", p), Segment("R", q)))
        )

    w = il1 - ir0
    d = abs(w)
    if d >= k:
        p = math.sqrt(d * d - k * k)
        chi = cmath.phase(w) - math.atan2(k, p)
        t = _mod2pi(th0 - chi)
        q = _mod2pi(th1 - chi)
        cands.append(
            (r_r * t + r_l * q + p, (Segment("R", t), Segment("S", p), Segment("L", q)))
        )

    # LRL / RLR: middle circle circumscribing both end circles, two apexes
    w = il1 - il0
    d = abs(w)
    if 0.0 < d <= 2.0 * k:
        beta = math.acos(d / (2.0 * k))
        chi = cmath.phase(w)
        for sgn in (1.0, -1.0):
            thc = chi + sgn * beta
            m = il0 + k * _cis(thc)
            t = _mod2pi(thc - cmath.phase(z0 - il0))
            mid = _mod2pi(cmath.phase(il0 - m) - cmath.phase(il1 - m))
            q = _mod2pi(cmath.phase(z1 - il1) - cmath.phase(m - il1))
            cands.append(
                (
                    r_l * (t + q) + r_r * mid,
                    (Segment("L", t), Segment("R", mid), Segment("L", q)),
                )
            )

    w = ir1 - ir0
    d = abs(w)
    if 0.0 < d <= 2.0 * k:
        beta = math.acos(d / (2.0 * k))
        chi = cmath.phase(w)
        for sgn in (1.0, -1.0):
            thc = chi + sgn * beta
            m = ir0 + k * _cis(thc)
            t = _mod2pi(cmath.phase(z0 - ir0) - thc)
            mid = _mod2pi(cmath.phase(ir1 - m) - cmath.phase(ir0 - m))
            q = _mod2pi(cmath.phase(m - ir1) - cmath.phase(z1 - ir1))
            cands.append(
                (
                    r_r * (t + q) + r_l * mid,
                    (Segment("R", t), Segment("L", mid), Segment("R", q)),
                )
            )

    return min(cands, key=lambda c: c[0])
