"""Per-family path solvers in the canonical frame (start at origin, heading 0).

One- and two-segment families and CSC/SCS have closed forms. The four- and
five-segment families carry an interior turn whose angle and junction
straight length are both functions of a single parameter lambda > 1; those
are solved by a 1-D sweep plus Newton polish (4-segment) and a multi-start
damped Newton in (lambda, first arc angle) (5-segment).

Every solver re-propagates its candidates through the kinematics module and
discards anything whose closure error exceeds the effective tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    TAU,
    ZERO_MEASURE,
    Configuration,
    PathCandidate,
    Segment,
    VehicleSpec,
    normalize_angle,
    path_cost,
)
from .kinematics import (
    closure_residual,
    propagate_array,
    propagate_array_jacobian,
)

ORIGIN = Configuration(0.0, 0.0, 0.0)

# Slack for the "arc at most pi" bound on CC arcs.
TOL_ANGLE = 1e-9

# Parameter-space dedup threshold for root finding.
DEDUP_TOL = 1e-6

# lambda is swept as s = ln(lambda - 1) over lambda in [1 + 1e-6, 50].
LOG_S_LO = math.log(1e-6)
LOG_S_HI = math.log(49.0)

ONE_SEGMENT_FAMILIES = ("L", "R", "S")
TWO_SEGMENT_FAMILIES = ("LR", "LS", "RL", "RS", "SL", "SR")
CSC_FAMILIES = ("LSL", "LSR", "RSL", "RSR")
SCS_FAMILIES = ("SLS", "SRS")
FOUR_SEGMENT_FAMILIES = ("LSRS", "RSLS", "SLSR", "SRSL")
FIVE_SEGMENT_FAMILIES = ("LSRSL", "RSLSR")

WEIGHTED_FAMILIES = (
    ONE_SEGMENT_FAMILIES
    + TWO_SEGMENT_FAMILIES
    + CSC_FAMILIES
    + SCS_FAMILIES
    + FOUR_SEGMENT_FAMILIES
    + FIVE_SEGMENT_FAMILIES
)


@dataclass(frozen=True)
class LambdaParam:
    """The interior-turn parameter; must exceed 1."""

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not (math.isfinite(v) and v > 1.0):
            raise ValueError(f"lambda must be finite and > 1, got {v!r}")
        object.__setattr__(self, "value", v)

    def __float__(self) -> float:
        return self.value


@dataclass
class SolveOptions:
    """Root-finding and acceptance knobs shared by all solvers.

    tol_closure is a relative scale: the effective closure tolerance for a
    goal g is tol_closure * max(1, |g|).
    """

    lambda_grid: int = 64
    angle_grid: int = 64
    max_iters: int = 50
    tol_root: float = 1e-10
    tol_closure: float = 1e-8

    def __post_init__(self):
        if self.lambda_grid < 1 or self.angle_grid < 1 or self.max_iters < 1:
            raise ValueError("grid sizes and max_iters must be >= 1")
        if not (self.tol_root > 0.0 and self.tol_closure > 0.0):
            raise ValueError("tolerances must be positive")


def effective_closure_tol(goal: Configuration, opts: SolveOptions) -> float:
    return opts.tol_closure * max(1.0, math.hypot(goal.x, goal.y))


def mid_turn_angle_from_lambda(p) -> float:
    """Interior turn angle for a given lambda; lies in (pi, 2*pi)."""
    lam = float(p)
    if not (math.isfinite(lam) and lam > 1.0):
        raise ValueError(f"lambda must be > 1, got {lam!r}")
    return TAU - 2.0 * math.acos(1.0 / lam)


def lambda_from_mid_turn_angle(phi: float) -> LambdaParam:
    """Invert mid_turn_angle_from_lambda; phi must lie in (pi, 2*pi)."""
    if not (math.pi < phi < TAU):
        raise ValueError(f"interior angle must lie in (pi, 2*pi), got {phi!r}")
    return LambdaParam(-1.0 / math.cos(0.5 * phi))


def junction_s_length(p, spec: VehicleSpec) -> float:
    """Straight length between opposite turns: (mu_L + mu_R)/sqrt(lambda^2 - 1)."""
    lam = float(p)
    if not (math.isfinite(lam) and lam > 1.0):
        raise ValueError(f"lambda must be > 1, got {lam!r}")
    return (spec.penalty_left + spec.penalty_right) / math.sqrt(lam * lam - 1.0)


def _finish(
    family: str,
    measures,
    goal: Configuration,
    spec: VehicleSpec,
    tol: float,
) -> PathCandidate | None:
    """Build, re-propagate, and accept or reject one candidate."""
    segs = []
    for kind, m in zip(family, measures):
        m = float(m)
        if m < 0.0:
            if m < -tol:
                return None
            m = 0.0
        if kind != "S" and m >= TAU:
            m = normalize_angle(m)
        segs.append(Segment(kind, m))
    segs = tuple(segs)
    res = closure_residual(ORIGIN, goal, segs, spec)
    cand = PathCandidate(family, segs, path_cost(segs, spec), res)
    if cand.max_error(spec.min_radius) > tol:
        return None
    return cand


def solve_one_segment(
    goal: Configuration, spec: VehicleSpec, opts: SolveOptions, stats: dict | None = None
) -> list[PathCandidate]:
    """Single-primitive candidates S, L, R."""
    tol = effective_closure_tol(goal, opts)
    out = []
    a = goal.heading
    for family, measure in (("L", a), ("R", normalize_angle(-a)), ("S", goal.x)):
        cand = _finish(family, (measure,), goal, spec, tol)
        if cand is not None:
            out.append(cand)
    return out


def solve_two_segment(
    goal: Configuration, spec: VehicleSpec, opts: SolveOptions, stats: dict | None = None
) -> list[PathCandidate]:
    """Two-primitive candidates LS, SL, RS, SR, LR, RL.

    For the turn-turn families the switch point lies on the line between the
    two circle centers; any non-degenerate arc above pi is rejected.
    """
    tol = effective_closure_tol(goal, opts)
    rl, rr = spec.radius_left, spec.radius_right
    a = goal.heading
    gx, gy = goal.x, goal.y
    ca, sa = math.cos(a), math.sin(a)
    out = []

    def attempt(family, measures):
        cand = _finish(family, measures, goal, spec, tol)
        if cand is not None:
            out.append(cand)

    # Arc then straight: arc angle is fixed by the goal heading.
    phi = a
    px = rl * math.sin(phi)
    py = rl * (1.0 - math.cos(phi))
    attempt("LS", (phi, (gx - px) * ca + (gy - py) * sa))

    phi = normalize_angle(-a)
    px = rr * math.sin(phi)
    py = -rr * (1.0 - math.cos(phi))
    attempt("RS", (phi, (gx - px) * ca + (gy - py) * sa))

    # Straight then arc: subtract the arc displacement rotated to heading 0.
    phi = a
    attempt("SL", (gx - rl * math.sin(phi), phi))

    phi = normalize_angle(-a)
    attempt("SR", (gx - rr * math.sin(phi), phi))

    # Turn-turn: centers are r_first + r_second apart; the direction from the
    # first center to the second encodes the switch heading.
    c2x = gx + rr * sa
    c2y = gy - rr * ca
    dx, dy = c2x - 0.0, c2y - rl
    phi1 = math.atan2(dx, -dy)
    phi1 = normalize_angle(phi1)
    phi2 = normalize_angle(phi1 - a)
    if _cc_arcs_ok((phi1, phi2)):
        attempt("LR", (phi1, phi2))

    c2x = gx - rl * sa
    c2y = gy + rl * ca
    dx, dy = c2x - 0.0, c2y + rr
    phi1 = normalize_angle(math.atan2(dx, dy))
    phi2 = normalize_angle(a + phi1)
    if _cc_arcs_ok((phi1, phi2)):
        attempt("RL", (phi1, phi2))

    return out


def _cc_arcs_ok(arcs) -> bool:
    """Non-degenerate turn-turn arcs may not exceed pi."""
    return all(m <= ZERO_MEASURE or m <= math.pi + TOL_ANGLE for m in arcs)


def solve_csc(
    family: str,
    goal: Configuration,
    spec: VehicleSpec,
    opts: SolveOptions,
    stats: dict | None = None,
) -> list[PathCandidate]:
    """Turn-straight-turn via the tangent line between the boundary circles."""
    if family not in CSC_FAMILIES:
        raise ValueError(f"unknown CSC family {family!r}")
    tol = effective_closure_tol(goal, opts)
    rl, rr = spec.radius_left, spec.radius_right
    a = goal.heading
    gx, gy = goal.x, goal.y
    ca, sa = math.cos(a), math.sin(a)

    if family == "LSL":
        dx, dy = (gx - rl * sa) - 0.0, (gy + rl * ca) - rl
        psi = math.atan2(dy, dx)
        measures = (normalize_angle(psi), math.hypot(dx, dy), normalize_angle(a - psi))
    elif family == "RSR":
        dx, dy = (gx + rr * sa) - 0.0, (gy - rr * ca) + rr
        psi = math.atan2(dy, dx)
        measures = (normalize_angle(-psi), math.hypot(dx, dy), normalize_angle(psi - a))
    elif family == "LSR":
        dx, dy = (gx + rr * sa) - 0.0, (gy - rr * ca) - rl
        d = math.hypot(dx, dy)
        k = rl + rr
        if d < k:
            return []
        span = math.sqrt(max(d * d - k * k, 0.0))
        psi = math.atan2(dy, dx) + math.atan2(k, span)
        measures = (normalize_angle(psi), span, normalize_angle(psi - a))
    else:  # RSL
        dx, dy = (gx - rl * sa) - 0.0, (gy + rl * ca) + rr
        d = math.hypot(dx, dy)
        k = rl + rr
        if d < k:
            return []
        span = math.sqrt(max(d * d - k * k, 0.0))
        psi = math.atan2(dy, dx) - math.atan2(k, span)
        measures = (normalize_angle(-psi), span, normalize_angle(a - psi))

    cand = _finish(family, measures, goal, spec, tol)
    return [cand] if cand is not None else []


def solve_scs(
    family: str,
    goal: Configuration,
    spec: VehicleSpec,
    opts: SolveOptions,
    stats: dict | None = None,
) -> list[PathCandidate]:
    """Straight-turn-straight; the interior arc must lie in (pi, 2*pi) unless
    one straight degenerates."""
    if family not in SCS_FAMILIES:
        raise ValueError(f"unknown SCS family {family!r}")
    tol = effective_closure_tol(goal, opts)
    a = goal.heading
    ca, sa = math.cos(a), math.sin(a)

    # Line lengths l1, l2 solve l1*(1,0) + l2*(cos a, sin a) = goal - arc
    # displacement; singular when the headings are parallel.
    mat = np.array([[1.0, ca], [0.0, sa]])
    if np.linalg.cond(mat) > 1e12:
        return []

    if family == "SLS":
        r = spec.radius_left
        phi = a
        arc_dx = r * math.sin(phi)
        arc_dy = r * (1.0 - math.cos(phi))
    else:  # SRS
        r = spec.radius_right
        phi = normalize_angle(-a)
        arc_dx = r * math.sin(phi)
        arc_dy = -r * (1.0 - math.cos(phi))

    rhs = np.array([goal.x - arc_dx, goal.y - arc_dy])
    l1, l2 = np.linalg.solve(mat, rhs)
    if l1 > ZERO_MEASURE and l2 > ZERO_MEASURE and not (math.pi < phi < TAU):
        return []
    cand = _finish(family, (l1, phi, l2), goal, spec, tol)
    return [cand] if cand is not None else []


# Four-segment family layout: index of the lambda-junction straight, index of
# the free boundary straight, index of the interior turn, index of the outer
# turn, and the sign linking the outer angle to heading + interior angle.
_FOUR_TABLE = {
    # family: (junction_idx, free_idx, interior_idx, outer_idx, outer_fn)
    "LSRS": (1, 3, 2, 0, lambda a, phi_in: a + phi_in),
    "SLSR": (2, 0, 1, 3, lambda a, phi_in: phi_in - a),
    "RSLS": (1, 3, 2, 0, lambda a, phi_in: phi_in - a),
    "SRSL": (2, 0, 1, 3, lambda a, phi_in: a + phi_in),
}


def _four_measures(family: str, s: np.ndarray, goal: Configuration, spec: VehicleSpec):
    """Measures array (with the free straight zeroed) for a batch of s values."""
    lam = 1.0 + np.exp(s)
    phi_in = TAU - 2.0 * np.arccos(1.0 / lam)
    lj = (spec.penalty_left + spec.penalty_right) / np.sqrt(lam * lam - 1.0)
    junction_idx, free_idx, interior_idx, outer_idx, outer_fn = _FOUR_TABLE[family]
    phi_out = np.mod(outer_fn(goal.heading, phi_in), TAU)
    measures = np.zeros(s.shape + (4,))
    measures[..., junction_idx] = lj
    measures[..., interior_idx] = phi_in
    measures[..., outer_idx] = phi_out
    return measures, lam, phi_in, lj, phi_out, free_idx


def _four_gap(family: str, s: np.ndarray, goal: Configuration, spec: VehicleSpec):
    """Cross-track gap of the goal from the free-straight line, plus the
    along-track free length."""
    measures, lam, phi_in, lj, phi_out, free_idx = _four_measures(family, s, goal, spec)
    bx, by, _ = propagate_array(family, measures, spec)
    if free_idx == 0:
        # Free straight leads the path along heading 0; the rest is rigid.
        ux, uy = 1.0, 0.0
    else:
        ux, uy = math.cos(goal.heading), math.sin(goal.heading)
    gap = ux * (goal.y - by) - uy * (goal.x - bx)
    along = ux * (goal.x - bx) + uy * (goal.y - by)
    return gap, along, measures, free_idx


def solve_four_segment(
    family: str,
    goal: Configuration,
    spec: VehicleSpec,
    opts: SolveOptions,
    stats: dict | None = None,
) -> list[PathCandidate]:
    """Four-segment families: sweep lambda, root the cross-track gap, read the
    free straight length off the along-track projection."""
    if family not in _FOUR_TABLE:
        raise ValueError(f"unknown four-segment family {family!r}")
    if spec.penalty_left + spec.penalty_right <= 0.0:
        return []
    tol = effective_closure_tol(goal, opts)
    scale = max(1.0, math.hypot(goal.x, goal.y))
    n = max(512, 8 * opts.lambda_grid)
    grid = np.linspace(LOG_S_LO, LOG_S_HI, n)

    def gap_of(s: np.ndarray) -> np.ndarray:
        g, _, _, _ = _four_gap(family, s, goal, spec)
        return g

    gap = gap_of(grid)

    cross = (gap[:-1] * gap[1:] < 0.0) | (gap[:-1] == 0.0)
    lo = grid[:-1][cross]
    hi = grid[1:][cross]
    glo = gap[:-1][cross]
    ghi = gap[1:][cross]

    # Shrink each bracket by repeated subdivision (all brackets in one batch),
    # then finish with damped secant steps.
    div = 48
    frac = np.linspace(0.0, 1.0, div + 1)
    for _ in range(3):
        if lo.size == 0:
            break
        ss = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
        gg = gap_of(ss.ravel()).reshape(ss.shape)
        sign = (gg[:, :-1] * gg[:, 1:] < 0.0) | (gg[:, :-1] == 0.0)
        has = np.any(sign, axis=1)
        idx = np.where(has, np.argmax(sign, axis=1), 0)
        rows = np.arange(lo.size)
        lo = ss[rows, idx]
        hi = ss[rows, idx + 1]
        glo = gg[rows, idx]
        ghi = gg[rows, idx + 1]

    s_prev, g_prev = lo, glo
    s_cur, g_cur = hi, ghi
    span = np.maximum(hi - lo, 1e-15)
    for _ in range(6):
        if s_cur.size == 0:
            break
        denom = g_cur - g_prev
        safe = np.abs(denom) > 0.0
        step = np.where(safe, g_cur * (s_cur - s_prev) / np.where(safe, denom, 1.0), 0.0)
        s_next = np.clip(s_cur - step, lo - span, hi + span)
        g_next = gap_of(s_next)
        s_prev, g_prev = s_cur, g_cur
        s_cur, g_cur = s_next, g_next
    better = np.abs(g_prev) < np.abs(g_cur)
    roots = list(np.where(better, s_prev, s_cur))

    # Tangency: local minima of |gap| on the sweep grid that never cross zero
    # are refined by subdivision on |gap| and kept only if they reach a root.
    agap = np.abs(gap)
    interior = np.arange(1, n - 1)
    is_min = (
        (agap[interior] < 1e-4 * scale)
        & (agap[interior] <= agap[interior - 1])
        & (agap[interior] <= agap[interior + 1])
        & (gap[interior - 1] * gap[interior] > 0.0)
        & (gap[interior] * gap[interior + 1] > 0.0)
    )
    t_lo = grid[interior - 1][is_min]
    t_hi = grid[interior + 1][is_min]
    for _ in range(4):
        if t_lo.size == 0:
            break
        ss = t_lo[:, None] + (t_hi - t_lo)[:, None] * frac[None, :]
        gg = np.abs(gap_of(ss.ravel()).reshape(ss.shape))
        idx = np.argmin(gg, axis=1)
        rows = np.arange(t_lo.size)
        pick = ss[rows, idx]
        width = (t_hi - t_lo) / div
        t_lo = pick - width
        t_hi = pick + width
    if t_lo.size:
        t_mid = 0.5 * (t_lo + t_hi)
        t_ok = np.abs(gap_of(t_mid)) <= opts.tol_root * scale
        roots.extend(t_mid[t_ok])

    if stats is not None:
        stats["sweep_points"] = n
        stats["roots"] = len(roots)

    out = []
    seen: list[tuple] = []
    for s in sorted(float(v) for v in roots):
        _, along, measures, free_idx = _four_gap(family, np.array([s]), goal, spec)
        l_free = float(along[0])
        if l_free < -tol:
            continue
        m = measures[0].copy()
        m[free_idx] = max(l_free, 0.0)
        key = (1.0 + math.exp(s),) + tuple(m)
        if any(all(abs(a - b) < DEDUP_TOL for a, b in zip(key, k)) for k in seen):
            continue
        seen.append(key)
        cand = _finish(family, m, goal, spec, tol)
        if cand is not None:
            out.append(cand)
    return out


def _five_phi3(family: str, a: float, phi1, phi2):
    if family == "LSRSL":
        return a - phi1 + phi2
    return phi2 - phi1 - a


def solve_five_segment(
    family: str,
    goal: Configuration,
    spec: VehicleSpec,
    opts: SolveOptions,
    stats: dict | None = None,
) -> list[PathCandidate]:
    """Five-segment families via batched damped Newton over (ln(lambda-1), phi1).

    The interior angle, both junction straights, and the trailing arc are all
    functions of (lambda, phi1) once the heading equation is imposed, leaving
    two position equations for two unknowns.
    """
    if family not in FIVE_SEGMENT_FAMILIES:
        raise ValueError(f"unknown five-segment family {family!r}")
    musum = spec.penalty_left + spec.penalty_right
    if musum <= 0.0:
        return []
    tol = effective_closure_tol(goal, opts)
    scale = max(1.0, math.hypot(goal.x, goal.y))
    tol_f = opts.tol_root * scale
    a = goal.heading
    gx, gy = goal.x, goal.y

    s0 = np.linspace(LOG_S_LO, LOG_S_HI, opts.lambda_grid)
    p0 = np.linspace(0.0, TAU, opts.angle_grid, endpoint=False)
    s, phi1 = (v.ravel() for v in np.meshgrid(s0, p0))
    s = s.copy()
    phi1 = phi1.copy()

    def evaluate(s, phi1, want_jac):
        lam = 1.0 + np.exp(s)
        root = np.sqrt(lam * lam - 1.0)
        phi2 = TAU - 2.0 * np.arccos(1.0 / lam)
        lj = musum / root
        phi3 = _five_phi3(family, a, phi1, phi2)
        measures = np.stack([phi1, lj, phi2, lj, phi3], axis=-1)
        if not want_jac:
            x, y, _ = propagate_array(family, measures, spec)
            return np.stack([x - gx, y - gy], axis=-1)
        x, y, _, jx, jy, _ = propagate_array_jacobian(family, measures, spec)
        dlam = lam - 1.0
        dphi2 = -2.0 / (lam * root) * dlam
        dlj = -musum * lam / root**3 * dlam
        # phi3 tracks phi2 through s and opposes phi1 in both families.
        jxs = (jx[:, 1] + jx[:, 3]) * dlj + (jx[:, 2] + jx[:, 4]) * dphi2
        jys = (jy[:, 1] + jy[:, 3]) * dlj + (jy[:, 2] + jy[:, 4]) * dphi2
        jxp = jx[:, 0] - jx[:, 4]
        jyp = jy[:, 0] - jy[:, 4]
        f = np.stack([x - gx, y - gy], axis=-1)
        jac = np.stack(
            [np.stack([jxs, jxp], axis=-1), np.stack([jys, jyp], axis=-1)], axis=-2
        )
        return f, jac

    converged: list[tuple[float, float]] = []
    stall = np.zeros(s.shape[0], dtype=int)
    total_iters = 0
    for _ in range(opts.max_iters):
        if s.size == 0:
            break
        total_iters += 1
        f, jac = evaluate(s, phi1, True)
        fn = np.max(np.abs(f), axis=-1)
        done = fn <= tol_f
        if np.any(done):
            converged.extend(zip(s[done], phi1[done]))
            keep = ~done
            s, phi1, f, jac, fn, stall = (
                s[keep],
                phi1[keep],
                f[keep],
                jac[keep],
                fn[keep],
                stall[keep],
            )
            if s.size == 0:
                break
        det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
        ok = np.abs(det) > 1e-14
        det_safe = np.where(ok, det, 1.0)
        ds = -(jac[:, 1, 1] * f[:, 0] - jac[:, 0, 1] * f[:, 1]) / det_safe
        dp = -(-jac[:, 1, 0] * f[:, 0] + jac[:, 0, 0] * f[:, 1]) / det_safe
        ds = np.clip(np.where(ok, ds, 0.0), -1.5, 1.5)
        dp = np.clip(np.where(ok, dp, 0.0), -1.5, 1.5)

        improved = np.zeros(s.shape[0], dtype=bool)
        s_new = s.copy()
        p_new = phi1.copy()
        alpha = 1.0
        pending = ~improved
        for _ in range(4):
            if not np.any(pending):
                break
            st = np.clip(s[pending] + alpha * ds[pending], LOG_S_LO - 4.0, LOG_S_HI + 3.0)
            pt = phi1[pending] + alpha * dp[pending]
            ft = evaluate(st, pt, False)
            good = np.max(np.abs(ft), axis=-1) < fn[pending]
            idx = np.flatnonzero(pending)[good]
            s_new[idx] = st[good]
            p_new[idx] = pt[good]
            improved[idx] = True
            pending = ~improved & ok
            alpha *= 0.25
        stall = np.where(improved, 0, stall + 1)
        keep = (stall < 2) & ok
        s, phi1, stall = s_new[keep], p_new[keep], stall[keep]
        # Iterates that have drifted together share a basin; collapse them so
        # the tail of the iteration runs on distinct trajectories only.
        if total_iters >= 4 and s.size > 32:
            key = np.stack([np.round(s, 5), np.round(np.mod(phi1, TAU), 5)], axis=-1)
            _, first = np.unique(key, axis=0, return_index=True)
            first.sort()
            s, phi1, stall = s[first], phi1[first], stall[first]

    if stats is not None:
        stats["iterations"] = total_iters
        stats["starts"] = opts.lambda_grid * opts.angle_grid
        stats["converged"] = len(converged)

    out = []
    seen: list[tuple[float, float]] = []
    for sv, pv in sorted(converged):
        lam = 1.0 + math.exp(sv)
        p_norm = normalize_angle(pv)
        key = (lam, p_norm)
        if any(
            abs(lam - k0) < DEDUP_TOL
            and min(abs(p_norm - k1), TAU - abs(p_norm - k1)) < DEDUP_TOL
            for k0, k1 in seen
        ):
            continue
        seen.append(key)
        phi2 = mid_turn_angle_from_lambda(lam)
        lj = junction_s_length(lam, spec)
        phi3 = normalize_angle(_five_phi3(family, a, p_norm, phi2))
        cand = _finish(family, (p_norm, lj, phi2, lj, phi3), goal, spec, tol)
        if cand is not None:
            out.append(cand)
    return out
