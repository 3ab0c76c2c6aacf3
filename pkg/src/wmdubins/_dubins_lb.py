"""Scalar asymmetric-radius Dubins word constructions.

Plain-float helpers shared by the lattice search: a length lower bound used
as the A* heuristic, and a weighted-cost analytic completion used to finish
a search prefix at the exact goal pose.  Kept free of numpy so the
pure-Python lattice kernel stays allocation-light; the compiled kernel
carries a C transliteration of the same formulas, and the two are
cross-checked in the tests.
"""

from __future__ import annotations

import math

TWO_PI = 2.0 * math.pi

_INF = float("inf")


def _mod2pi(a: float) -> float:
    a = math.fmod(a, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:  # adding 2*pi to a tiny negative can round right back up
        a = 0.0
    return a


def dubins_length(
    x0: float,
    y0: float,
    th0: float,
    x1: float,
    y1: float,
    th1: float,
    rl: float,
    rr: float,
) -> float:
    """Shortest Dubins path length between two poses, radii rl (left) / rr (right).

    Minimizes over LSL, RSR, LSR, RSL and both circumscribed CCC apexes.
    Sub-pi middle arcs are kept: they are valid paths, and for lower-bound
    use a too-small value is safe while a missing word would not be.
    """
    s0, c0 = math.sin(th0), math.cos(th0)
    s1, c1 = math.sin(th1), math.cos(th1)
    # turn centers
    lx0, ly0 = x0 - rl * s0, y0 + rl * c0
    rx0, ry0 = x0 + rr * s0, y0 - rr * c0
    lx1, ly1 = x1 - rl * s1, y1 + rl * c1
    rx1, ry1 = x1 + rr * s1, y1 - rr * c1

    best = _INF

    # LSL
    dx, dy = lx1 - lx0, ly1 - ly0
    psi = math.atan2(dy, dx)
    t = _mod2pi(psi - th0)
    q = _mod2pi(th1 - psi)
    cand = rl * (t + q) + math.hypot(dx, dy)
    if cand < best:
        best = cand

    # RSR
    dx, dy = rx1 - rx0, ry1 - ry0
    psi = math.atan2(dy, dx)
    t = _mod2pi(th0 - psi)
    q = _mod2pi(psi - th1)
    cand = rr * (t + q) + math.hypot(dx, dy)
    if cand < best:
        best = cand

    k = rl + rr

    # LSR
    dx, dy = rx1 - lx0, ry1 - ly0
    d2 = dx * dx + dy * dy
    if d2 >= k * k:
        span = math.sqrt(d2 - k * k)
        psi = math.atan2(dy, dx) + math.atan2(k, span)
        t = _mod2pi(psi - th0)
        q = _mod2pi(psi - th1)
        cand = rl * t + rr * q + span
        if cand < best:
            best = cand

    # RSL
    dx, dy = lx1 - rx0, ly1 - ry0
    d2 = dx * dx + dy * dy
    if d2 >= k * k:
        span = math.sqrt(d2 - k * k)
        psi = math.atan2(dy, dx) - math.atan2(k, span)
        t = _mod2pi(th0 - psi)
        q = _mod2pi(th1 - psi)
        cand = rr * t + rl * q + span
        if cand < best:
            best = cand

    # LRL
    dx, dy = lx1 - lx0, ly1 - ly0
    d = math.hypot(dx, dy)
    if d <= 2.0 * k and d > 0.0:
        beta = math.acos(d / (2.0 * k))
        chi = math.atan2(dy, dx)
        for sgn in (1.0, -1.0):
            thc = chi + sgn * beta
            mx, my = lx0 + k * math.cos(thc), ly0 + k * math.sin(thc)
            t = _mod2pi(thc - math.atan2(y0 - ly0, x0 - lx0))
            p = _mod2pi(math.atan2(ly0 - my, lx0 - mx) - math.atan2(ly1 - my, lx1 - mx))
            q = _mod2pi(math.atan2(y1 - ly1, x1 - lx1) - math.atan2(my - ly1, mx - lx1))
            cand = rl * (t + q) + rr * p
            if cand < best:
                best = cand

    # RLR
    dx, dy = rx1 - rx0, ry1 - ry0
    d = math.hypot(dx, dy)
    if d <= 2.0 * k and d > 0.0:
        beta = math.acos(d / (2.0 * k))
        chi = math.atan2(dy, dx)
        for sgn in (1.0, -1.0):
            thc = chi + sgn * beta
            mx, my = rx0 + k * math.cos(thc), ry0 + k * math.sin(thc)
            t = _mod2pi(math.atan2(y0 - ry0, x0 - rx0) - thc)
            p = _mod2pi(math.atan2(ry1 - my, rx1 - mx) - math.atan2(ry0 - my, rx0 - mx))
            q = _mod2pi(math.atan2(my - ry1, mx - rx1) - math.atan2(y1 - ry1, x1 - rx1))
            cand = rr * (t + q) + rl * p
            if cand < best:
                best = cand

    if best is _INF:
        # degenerate coincident-center corner; zero is always a lower bound
        return 0.0
    return best


def dubins_completion(
    x0: float,
    y0: float,
    th0: float,
    x1: float,
    y1: float,
    th1: float,
    rl: float,
    rr: float,
    mul: float,
    mur: float,
):
    """Cheapest Dubins word by weighted cost, as (cost, ((kind, measure), ...)).

    Arc measures are radians, straight measures meters.  The word set is the
    same as dubins_length; costs price left/right arc length at (1 + mu/r)
    per meter, i.e. (r + mu) per radian.  Returns (inf, ()) only in the
    coincident-pose corner where every construction degenerates.
    """
    s0, c0 = math.sin(th0), math.cos(th0)
    s1, c1 = math.sin(th1), math.cos(th1)
    lx0, ly0 = x0 - rl * s0, y0 + rl * c0
    rx0, ry0 = x0 + rr * s0, y0 - rr * c0
    lx1, ly1 = x1 - rl * s1, y1 + rl * c1
    rx1, ry1 = x1 + rr * s1, y1 - rr * c1

    wl = rl + mul
    wr = rr + mur

    best = _INF
    best_segs = ()

    # LSL
    dx, dy = lx1 - lx0, ly1 - ly0
    psi = math.atan2(dy, dx)
    t = _mod2pi(psi - th0)
    q = _mod2pi(th1 - psi)
    p = math.hypot(dx, dy)
    cand = wl * (t + q) + p
    if cand < best:
        best = cand
        best_segs = (("L", t), ("S", p), ("L", q))

    # RSR
    dx, dy = rx1 - rx0, ry1 - ry0
    psi = math.atan2(dy, dx)
    t = _mod2pi(th0 - psi)
    q = _mod2pi(psi - th1)
    p = math.hypot(dx, dy)
    cand = wr * (t + q) + p
    if cand < best:
        best = cand
        best_segs = (("R", t), ("S", p), ("R", q))

    k = rl + rr

    # LSR
    dx, dy = rx1 - lx0, ry1 - ly0
    d2 = dx * dx + dy * dy
    if d2 >= k * k:
        span = math.sqrt(d2 - k * k)
        psi = math.atan2(dy, dx) + math.atan2(k, span)
        t = _mod2pi(psi - th0)
        q = _mod2pi(psi - th1)
        cand = wl * t + wr * q + span
        if cand < best:
            best = cand
            best_segs = (("L", t), ("S", span), ("R", q))

    # RSL
    dx, dy = lx1 - rx0, ly1 - ry0
    d2 = dx * dx + dy * dy
    if d2 >= k * k:
        span = math.sqrt(d2 - k * k)
        psi = math.atan2(dy, dx) - math.atan2(k, span)
        t = _mod2pi(th0 - psi)
        q = _mod2pi(th1 - psi)
        cand = wr * t + wl * q + span
        if cand < best:
            best = cand
            best_segs = (("R", t), ("S", span), ("L", q))

    # LRL
    dx, dy = lx1 - lx0, ly1 - ly0
    d = math.hypot(dx, dy)
    if d <= 2.0 * k and d > 0.0:
        beta = math.acos(d / (2.0 * k))
        chi = math.atan2(dy, dx)
        for sgn in (1.0, -1.0):
            thc = chi + sgn * beta
            mx, my = lx0 + k * math.cos(thc), ly0 + k * math.sin(thc)
            t = _mod2pi(thc - math.atan2(y0 - ly0, x0 - lx0))
            p = _mod2pi(math.atan2(ly0 - my, lx0 - mx) - math.atan2(ly1 - my, lx1 - mx))
            q = _mod2pi(math.atan2(y1 - ly1, x1 - lx1) - math.atan2(my - ly1, mx - lx1))
            cand = wl * (t + q) + wr * p
            if cand < best:
                best = cand
                best_segs = (("L", t), ("R", p), ("L", q))

    # RLR
    dx, dy = rx1 - rx0, ry1 - ry0
    d = math.hypot(dx, dy)
    if d <= 2.0 * k and d > 0.0:
        beta = math.acos(d / (2.0 * k))
        chi = math.atan2(dy, dx)
        for sgn in (1.0, -1.0):
            thc = chi + sgn * beta
            mx, my = rx0 + k * math.cos(thc), ry0 + k * math.sin(thc)
            t = _mod2pi(math.atan2(y0 - ry0, x0 - rx0) - thc)
            p = _mod2pi(math.atan2(ry1 - my, rx1 - mx) - math.atan2(ry0 - my, rx0 - mx))
            q = _mod2pi(math.atan2(my - ry1, mx - rx1) - math.atan2(y1 - ry1, x1 - rx1))
            cand = wr * (t + q) + wl * p
            if cand < best:
                best = cand
                best_segs = (("R", t), ("L", p), ("R", q))

    return best, best_segs
