"""Pure-Python hybrid-state lattice search kernel.

Fallback used when the compiled extension is unavailable.  The compiled
kernel in _lattice.pyx implements the same algorithm; tests assert the two
agree.  Poses are kept continuous, deduplication happens on quantized
(x, y, heading) cells, and the priority queue orders by g + h with an
admissible Dubins-length heuristic.

Two goal regimes:

* analytic completion (default): every popped node tries a closed-form
  Dubins tail to the exact goal pose, priced at the weighted rates; the
  search stops once the frontier cannot beat the best prefix+tail found.
* cell tolerance: a node within the position/heading tolerances ends the
  search; exhausting the node budget or the open set reports infeasible.
"""

from __future__ import annotations

import heapq
import math

from ._dubins_lb import dubins_completion, dubins_length

STATUS_OK = 0
STATUS_NODE_BUDGET = 1
STATUS_EXHAUSTED = 2

_EPS_G = 1e-12


def run_search(
    gx: float,
    gy: float,
    gth: float,
    rl: float,
    rr: float,
    mul: float,
    mur: float,
    prim_kinds,          # sequence of int: 0=L, 1=R, 2=S
    prim_measures,       # sequence of float, same length
    xmin: float,
    xmax: float,
    ymin: float,
    ymax: float,
    xy_res: float,
    heading_bins: int,
    max_nodes: int,
    analytic_completion: bool,
    goal_xy_tol: float,
    goal_heading_tol: float,
):
    """Search from the canonical start pose (0, 0, 0) toward (gx, gy, gth).

    Returns (status, cost, prefix_prim_ids, tail_segments, stats).
    tail_segments is a tuple of (kind, measure) pairs appended after the
    primitive prefix (empty when the goal is met by a lattice node).
    """
    hbin = (2.0 * math.pi) / heading_bins
    r_min = min(rl, rr)
    r_max = max(rl, rr)
    mu_min = min(mul, mur)
    wl = rl + mul
    wr = rr + mur

    # heuristic slack for the tolerance-ball goal regime
    if analytic_completion:
        slack_len = 0.0
    else:
        slack_len = goal_xy_tol + r_max * goal_heading_tol + 4.0 * math.sqrt(
            r_max * goal_xy_tol
        )

    def heuristic(x, y, th):
        d = dubins_length(x, y, th, gx, gy, gth, rl, rr)
        dth = abs(math.remainder(th - gth, 2.0 * math.pi))
        if analytic_completion:
            return d + mu_min * dth
        h = d - slack_len
        if h < 0.0:
            h = 0.0
        extra = dth - goal_heading_tol
        if extra > 0.0:
            h += mu_min * extra
        return h

    prim_kinds = list(prim_kinds)
    prim_measures = [float(m) for m in prim_measures]
    n_prims = len(prim_kinds)

    xs = [0.0]
    ys = [0.0]
    ths = [0.0]
    gs = [0.0]
    parents = [-1]
    prims = [-1]

    best_g = {}

    def cell_of(x, y, th):
        # floor(t + 0.5) instead of round(): keeps parity with the C kernel
        it = int(math.floor(th / hbin + 0.5)) % heading_bins
        return (int(math.floor((x - xmin) / xy_res)),
                int(math.floor((y - ymin) / xy_res)),
                it)

    best_g[cell_of(0.0, 0.0, 0.0)] = 0.0

    ub_cost = math.inf
    ub_node = -1
    ub_tail = ()
    goal_node = -1

    if analytic_completion:
        c, segs = dubins_completion(0.0, 0.0, 0.0, gx, gy, gth, rl, rr, mul, mur)
        if c < ub_cost:
            ub_cost, ub_node, ub_tail = c, 0, segs

    open_heap = [(heuristic(0.0, 0.0, 0.0), 0, 0, 0.0)]
    counter = 1
    n_pop = 0
    status = STATUS_EXHAUSTED

    while open_heap:
        f, _, nid, g_entry = heapq.heappop(open_heap)
        if g_entry > gs[nid] + _EPS_G:
            continue
        if f >= ub_cost - _EPS_G and analytic_completion:
            status = STATUS_OK
            break
        n_pop += 1
        x, y, th = xs[nid], ys[nid], ths[nid]
        g = gs[nid]

        if analytic_completion:
            c, segs = dubins_completion(x, y, th, gx, gy, gth, rl, rr, mul, mur)
            if g + c < ub_cost:
                ub_cost, ub_node, ub_tail = g + c, nid, segs
        else:
            if (math.hypot(x - gx, y - gy) <= goal_xy_tol
                    and abs(math.remainder(th - gth, 2.0 * math.pi)) <= goal_heading_tol):
                goal_node = nid
                ub_cost = g
                status = STATUS_OK
                break

        for pid in range(n_prims):
            kind = prim_kinds[pid]
            m = prim_measures[pid]
            if kind == 0:
                th2 = th + m
                x2 = x + rl * (math.sin(th2) - math.sin(th))
                y2 = y - rl * (math.cos(th2) - math.cos(th))
                g2 = g + wl * m
            elif kind == 1:
                th2 = th - m
                x2 = x + rr * (math.sin(th) - math.sin(th2))
                y2 = y + rr * (math.cos(th2) - math.cos(th))
                g2 = g + wr * m
            else:
                x2 = x + m * math.cos(th)
                y2 = y + m * math.sin(th)
                th2 = th
                g2 = g + m
            if x2 < xmin or x2 > xmax or y2 < ymin or y2 > ymax:
                continue
            th2 = math.remainder(th2, 2.0 * math.pi)
            key = cell_of(x2, y2, th2)
            old = best_g.get(key)
            if old is not None and g2 >= old - _EPS_G:
                continue
            h2 = heuristic(x2, y2, th2)
            f2 = g2 + h2
            if f2 >= ub_cost - _EPS_G:
                continue
            best_g[key] = g2
            xs.append(x2)
            ys.append(y2)
            ths.append(th2)
            gs.append(g2)
            parents.append(nid)
            prims.append(pid)
            heapq.heappush(open_heap, (f2, counter, len(xs) - 1, g2))
            counter += 1
            if len(xs) >= max_nodes:
                break
        if len(xs) >= max_nodes:
            status = STATUS_NODE_BUDGET
            break
    else:
        if analytic_completion:
            status = STATUS_OK

    stats = {"nodes": len(xs), "expanded": n_pop}

    if analytic_completion:
        if ub_node < 0:
            return STATUS_EXHAUSTED, math.inf, [], (), stats
        prefix = _walk(parents, prims, ub_node)
        return status, ub_cost, prefix, ub_tail, stats

    if goal_node < 0:
        if status == STATUS_OK:
            status = STATUS_EXHAUSTED
        return status, math.inf, [], (), stats
    prefix = _walk(parents, prims, goal_node)
    return STATUS_OK, ub_cost, prefix, (), stats


def _walk(parents, prims, nid):
    out = []
    while nid > 0:
        out.append(prims[nid])
        nid = parents[nid]
    out.reverse()
    return out
