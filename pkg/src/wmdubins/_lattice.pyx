# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hybrid-state lattice search kernel.

C++ transliteration of _lattice_py.run_search; the two must stay
behaviorally identical (same expansion order, same tie-breaking, same
statuses).  dubins_length_ref / dubins_completion_ref expose the internal
Dubins formulas so tests can pin them against the pure-Python copies.
"""

from cython.operator cimport dereference as deref
from libc.math cimport (INFINITY, acos, atan2, cos, fabs, floor, fmod,
                        hypot, remainder, sin, sqrt)
from libcpp.pair cimport pair
from libcpp.queue cimport priority_queue
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

cdef double TWO_PI = 6.283185307179586476925286766559

cdef int STATUS_OK = 0
cdef int STATUS_NODE_BUDGET = 1
cdef int STATUS_EXHAUSTED = 2

cdef double EPS_G = 1e-12

ctypedef pair[double, long long] _Key
ctypedef pair[long long, double] _Val
ctypedef pair[_Key, _Val] _Entry


cdef inline double _mod2pi(double a) nogil:
    a = fmod(a, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:  # adding 2*pi to a tiny negative can round right back up
        a = 0.0
    return a


cdef double c_dubins_length(double x0, double y0, double th0,
                            double x1, double y1, double th1,
                            double rl, double rr) nogil:
    cdef double s0 = sin(th0), c0 = cos(th0)
    cdef double s1 = sin(th1), c1 = cos(th1)
    cdef double lx0 = x0 - rl * s0, ly0 = y0 + rl * c0
    cdef double rx0 = x0 + rr * s0, ry0 = y0 - rr * c0
    cdef double lx1 = x1 - rl * s1, ly1 = y1 + rl * c1
    cdef double rx1 = x1 + rr * s1, ry1 = y1 - rr * c1
    cdef double best = INFINITY
    cdef double dx, dy, psi, t, q, d2, span, d, beta, chi, thc, mx, my, p, cand, sgn
    cdef double k = rl + rr
    cdef int i

    dx = lx1 - lx0; dy = ly1 - ly0
    psi = atan2(dy, dx)
    t = _mod2pi(psi - th0)
    q = _mod2pi(th1 - psi)
    cand = rl * (t + q) + hypot(dx, dy)
    if cand < best:
        best = cand

    dx = rx1 - rx0; dy = ry1 - ry0
    psi = atan2(dy, dx)
    t = _mod2pi(th0 - psi)
    q = _mod2pi(psi - th1)
    cand = rr * (t + q) + hypot(dx, dy)
    if cand < best:
        best = cand

    dx = rx1 - lx0; dy = ry1 - ly0
    d2 = dx * dx + dy * dy
    if d2 >= k * k:
        span = sqrt(d2 - k * k)
        psi = atan2(dy, dx) + atan2(k, span)
        t = _mod2pi(psi - th0)
        q = _mod2pi(psi - th1)
        cand = rl * t + rr * q + span
        if cand < best:
            best = cand

    dx = lx1 - rx0; dy = ly1 - ry0
    d2 = dx * dx + dy * dy
    if d2 >= k * k:
        span = sqrt(d2 - k * k)
        psi = atan2(dy, dx) - atan2(k, span)
        t = _mod2pi(th0 - psi)
        q = _mod2pi(th1 - psi)
        cand = rr * t + rl * q + span
        if cand < best:
            best = cand

    dx = lx1 - lx0; dy = ly1 - ly0
    d = hypot(dx, dy)
    if d <= 2.0 * k and d > 0.0:
        beta = acos(d / (2.0 * k))
        chi = atan2(dy, dx)
        for i in range(2):
            sgn = 1.0 if i == 0 else -1.0
            thc = chi + sgn * beta
            mx = lx0 + k * cos(thc); my = ly0 + k * sin(thc)
            t = _mod2pi(thc - atan2(y0 - ly0, x0 - lx0))
            p = _mod2pi(atan2(ly0 - my, lx0 - mx) - atan2(ly1 - my, lx1 - mx))
            q = _mod2pi(atan2(y1 - ly1, x1 - lx1) - atan2(my - ly1, mx - lx1))
            cand = rl * (t + q) + rr * p
            if cand < best:
                best = cand

    dx = rx1 - rx0; dy = ry1 - ry0
    d = hypot(dx, dy)
    if d <= 2.0 * k and d > 0.0:
        beta = acos(d / (2.0 * k))
        chi = atan2(dy, dx)
        for i in range(2):
            sgn = 1.0 if i == 0 else -1.0
            thc = chi + sgn * beta
            mx = rx0 + k * cos(thc); my = ry0 + k * sin(thc)
            t = _mod2pi(atan2(y0 - ry0, x0 - rx0) - thc)
            p = _mod2pi(atan2(ry1 - my, rx1 - mx) - atan2(ry0 - my, rx0 - mx))
            q = _mod2pi(atan2(my - ry1, mx - rx1) - atan2(y1 - ry1, x1 - rx1))
            cand = rr * (t + q) + rl * p
            if cand < best:
                best = cand

    if best == INFINITY:
        return 0.0
    return best


cdef double c_dubins_completion(double x0, double y0, double th0,
                                double x1, double y1, double th1,
                                double rl, double rr, double mul, double mur,
                                signed char* kinds, double* meas) nogil:
    cdef double s0 = sin(th0), c0 = cos(th0)
    cdef double s1 = sin(th1), c1 = cos(th1)
    cdef double lx0 = x0 - rl * s0, ly0 = y0 + rl * c0
    cdef double rx0 = x0 + rr * s0, ry0 = y0 - rr * c0
    cdef double lx1 = x1 - rl * s1, ly1 = y1 + rl * c1
    cdef double rx1 = x1 + rr * s1, ry1 = y1 - rr * c1
    cdef double wl = rl + mul
    cdef double wr = rr + mur
    cdef double best = INFINITY
    cdef double dx, dy, psi, t, q, p, d2, span, d, beta, chi, thc, mx, my, cand, sgn
    cdef double k = rl + rr
    cdef int i

    dx = lx1 - lx0; dy = ly1 - ly0
    psi = atan2(dy, dx)
    t = _mod2pi(psi - th0)
    q = _mod2pi(th1 - psi)
    p = hypot(dx, dy)
    cand = wl * (t + q) + p
    if cand < best:
        best = cand
        kinds[0] = 0; kinds[1] = 2; kinds[2] = 0
        meas[0] = t; meas[1] = p; meas[2] = q

    dx = rx1 - rx0; dy = ry1 - ry0
    psi = atan2(dy, dx)
    t = _mod2pi(th0 - psi)
    q = _mod2pi(psi - th1)
    p = hypot(dx, dy)
    cand = wr * (t + q) + p
    if cand < best:
        best = cand
        kinds[0] = 1; kinds[1] = 2; kinds[2] = 1
        meas[0] = t; meas[1] = p; meas[2] = q

    dx = rx1 - lx0; dy = ry1 - ly0
    d2 = dx * dx + dy * dy
    if d2 >= k * k:
        span = sqrt(d2 - k * k)
        psi = atan2(dy, dx) + atan2(k, span)
        t = _mod2pi(psi - th0)
        q = _mod2pi(psi - th1)
        cand = wl * t + wr * q + span
        if cand < best:
            best = cand
            kinds[0] = 0; kinds[1] = 2; kinds[2] = 1
            meas[0] = t; meas[1] = span; meas[2] = q

    dx = lx1 - rx0; dy = ly1 - ry0
    d2 = dx * dx + dy * dy
    if d2 >= k * k:
        span = sqrt(d2 - k * k)
        psi = atan2(dy, dx) - atan2(k, span)
        t = _mod2pi(th0 - psi)
        q = _mod2pi(th1 - psi)
        cand = wr * t + wl * q + span
        if cand < best:
            best = cand
            kinds[0] = 1; kinds[1] = 2; kinds[2] = 0
            meas[0] = t; meas[1] = span; meas[2] = q

    dx = lx1 - lx0; dy = ly1 - ly0
    d = hypot(dx, dy)
    if d <= 2.0 * k and d > 0.0:
        beta = acos(d / (2.0 * k))
        chi = atan2(dy, dx)
        for i in range(2):
            sgn = 1.0 if i == 0 else -1.0
            thc = chi + sgn * beta
            mx = lx0 + k * cos(thc); my = ly0 + k * sin(thc)
            t = _mod2pi(thc - atan2(y0 - ly0, x0 - lx0))
            p = _mod2pi(atan2(ly0 - my, lx0 - mx) - atan2(ly1 - my, lx1 - mx))
            q = _mod2pi(atan2(y1 - ly1, x1 - lx1) - atan2(my - ly1, mx - lx1))
            cand = wl * (t + q) + wr * p
            if cand < best:
                best = cand
                kinds[0] = 0; kinds[1] = 1; kinds[2] = 0
                meas[0] = t; meas[1] = p; meas[2] = q

    dx = rx1 - rx0; dy = ry1 - ry0
    d = hypot(dx, dy)
    if d <= 2.0 * k and d > 0.0:
        beta = acos(d / (2.0 * k))
        chi = atan2(dy, dx)
        for i in range(2):
            sgn = 1.0 if i == 0 else -1.0
            thc = chi + sgn * beta
            mx = rx0 + k * cos(thc); my = ry0 + k * sin(thc)
            t = _mod2pi(atan2(y0 - ry0, x0 - rx0) - thc)
            p = _mod2pi(atan2(ry1 - my, rx1 - mx) - atan2(ry0 - my, rx0 - mx))
            q = _mod2pi(atan2(my - ry1, mx - rx1) - atan2(y1 - ry1, x1 - rx1))
            cand = wr * (t + q) + wl * p
            if cand < best:
                best = cand
                kinds[0] = 1; kinds[1] = 0; kinds[2] = 1
                meas[0] = t; meas[1] = p; meas[2] = q

    return best


def dubins_length_ref(double x0, double y0, double th0,
                      double x1, double y1, double th1,
                      double rl, double rr):
    """Expose the C Dubins length for cross-checking against the Python copy."""
    return c_dubins_length(x0, y0, th0, x1, y1, th1, rl, rr)


_KIND_NAMES = ("L", "R", "S")


def dubins_completion_ref(double x0, double y0, double th0,
                          double x1, double y1, double th1,
                          double rl, double rr, double mul, double mur):
    """Expose the C weighted completion for cross-checking."""
    cdef signed char kinds[3]
    cdef double meas[3]
    cdef double cost = c_dubins_completion(x0, y0, th0, x1, y1, th1,
                                           rl, rr, mul, mur, kinds, meas)
    if cost == INFINITY:
        return INFINITY, ()
    return cost, ((_KIND_NAMES[kinds[0]], meas[0]),
                  (_KIND_NAMES[kinds[1]], meas[1]),
                  (_KIND_NAMES[kinds[2]], meas[2]))


def run_search(double gx, double gy, double gth, double rl, double rr,
               double mul, double mur,
               prim_kinds_in, prim_measures_in,
               double xmin, double xmax, double ymin, double ymax,
               double xy_res, int heading_bins, long long max_nodes,
               bint analytic_completion,
               double goal_xy_tol, double goal_heading_tol):
    """Same contract as _lattice_py.run_search."""
    cdef vector[signed char] pk
    cdef vector[double] pm
    for v in prim_kinds_in:
        pk.push_back(<signed char> v)
    for w in prim_measures_in:
        pm.push_back(<double> w)
    cdef int n_prims = <int> pk.size()

    cdef double hbin = TWO_PI / heading_bins
    cdef double r_max = rl if rl > rr else rr
    cdef double mu_min = mul if mul < mur else mur
    cdef double wl = rl + mul
    cdef double wr = rr + mur

    cdef double slack_len = 0.0
    if not analytic_completion:
        slack_len = goal_xy_tol + r_max * goal_heading_tol + 4.0 * sqrt(
            r_max * goal_xy_tol)

    cdef vector[double] xs, ys, ths, gs
    cdef vector[int] parents
    cdef vector[int] prims
    xs.push_back(0.0); ys.push_back(0.0); ths.push_back(0.0); gs.push_back(0.0)
    parents.push_back(-1); prims.push_back(-1)

    cdef unordered_map[long long, double] best_g
    cdef unordered_map[long long, double].iterator mit

    cdef long long ny = <long long> floor((ymax - ymin) / xy_res) + 3
    cdef long long key

    key = _cell_key(0.0, 0.0, 0.0, xmin, ymin, xy_res, hbin, heading_bins, ny)
    best_g[key] = 0.0

    cdef double ub_cost = INFINITY
    cdef long long ub_node = -1
    cdef signed char ub_kinds[3]
    cdef double ub_meas[3]
    cdef signed char tk[3]
    cdef double tm[3]
    cdef long long goal_node = -1
    cdef double c
    cdef int have_tail = 0

    if analytic_completion:
        c = c_dubins_completion(0.0, 0.0, 0.0, gx, gy, gth, rl, rr, mul, mur,
                                ub_kinds, ub_meas)
        if c < ub_cost:
            ub_cost = c
            ub_node = 0
            have_tail = 1

    cdef priority_queue[_Entry] open_heap
    cdef double h0 = _heur(0.0, 0.0, 0.0, gx, gy, gth, rl, rr, mu_min,
                           analytic_completion, slack_len, goal_heading_tol)
    open_heap.push(_Entry(_Key(-h0, 0), _Val(0, 0.0)))
    cdef long long counter = 1
    cdef long long n_pop = 0
    cdef int status = STATUS_EXHAUSTED
    cdef int budget_hit = 0

    cdef _Entry top
    cdef double f, g_entry, g, x, y, th, x2, y2, th2, g2, m, h2, f2, dth, old
    cdef long long nid
    cdef int pid, kind

    while not open_heap.empty():
        top = open_heap.top()
        open_heap.pop()
        f = -top.first.first
        nid = top.second.first
        g_entry = top.second.second
        if g_entry > gs[<size_t> nid] + EPS_G:
            continue
        if analytic_completion and f >= ub_cost - EPS_G:
            status = STATUS_OK
            break
        n_pop += 1
        x = xs[<size_t> nid]; y = ys[<size_t> nid]; th = ths[<size_t> nid]
        g = gs[<size_t> nid]

        if analytic_completion:
            c = c_dubins_completion(x, y, th, gx, gy, gth, rl, rr, mul, mur,
                                    tk, tm)
            if g + c < ub_cost:
                ub_cost = g + c
                ub_node = nid
                ub_kinds[0] = tk[0]; ub_kinds[1] = tk[1]; ub_kinds[2] = tk[2]
                ub_meas[0] = tm[0]; ub_meas[1] = tm[1]; ub_meas[2] = tm[2]
                have_tail = 1
        else:
            dth = fabs(remainder(th - gth, TWO_PI))
            if hypot(x - gx, y - gy) <= goal_xy_tol and dth <= goal_heading_tol:
                goal_node = nid
                ub_cost = g
                status = STATUS_OK
                break

        for pid in range(n_prims):
            kind = pk[<size_t> pid]
            m = pm[<size_t> pid]
            if kind == 0:
                th2 = th + m
                x2 = x + rl * (sin(th2) - sin(th))
                y2 = y - rl * (cos(th2) - cos(th))
                g2 = g + wl * m
            elif kind == 1:
                th2 = th - m
                x2 = x + rr * (sin(th) - sin(th2))
                y2 = y + rr * (cos(th2) - cos(th))
                g2 = g + wr * m
            else:
                x2 = x + m * cos(th)
                y2 = y + m * sin(th)
                th2 = th
                g2 = g + m
            if x2 < xmin or x2 > xmax or y2 < ymin or y2 > ymax:
                continue
            th2 = remainder(th2, TWO_PI)
            key = _cell_key(x2, y2, th2, xmin, ymin, xy_res, hbin,
                            heading_bins, ny)
            mit = best_g.find(key)
            if mit != best_g.end() and g2 >= deref(mit).second - EPS_G:
                continue
            h2 = _heur(x2, y2, th2, gx, gy, gth, rl, rr, mu_min,
                       analytic_completion, slack_len, goal_heading_tol)
            f2 = g2 + h2
            if f2 >= ub_cost - EPS_G:
                continue
            best_g[key] = g2
            xs.push_back(x2); ys.push_back(y2); ths.push_back(th2)
            gs.push_back(g2)
            parents.push_back(<int> nid)
            prims.push_back(pid)
            open_heap.push(_Entry(_Key(-f2, -counter),
                                  _Val(<long long> xs.size() - 1, g2)))
            counter += 1
            if <long long> xs.size() >= max_nodes:
                break
        if <long long> xs.size() >= max_nodes:
            status = STATUS_NODE_BUDGET
            budget_hit = 1
            break

    if open_heap.empty() and not budget_hit and status == STATUS_EXHAUSTED:
        if analytic_completion:
            status = STATUS_OK

    stats = {"nodes": <long long> xs.size(), "expanded": n_pop}

    cdef list prefix
    if analytic_completion:
        if ub_node < 0:
            return STATUS_EXHAUSTED, INFINITY, [], (), stats
        prefix = _walk(parents, prims, ub_node)
        tail = ((_KIND_NAMES[ub_kinds[0]], ub_meas[0]),
                (_KIND_NAMES[ub_kinds[1]], ub_meas[1]),
                (_KIND_NAMES[ub_kinds[2]], ub_meas[2])) if have_tail else ()
        return status, ub_cost, prefix, tail, stats

    if goal_node < 0:
        return status, INFINITY, [], (), stats
    prefix = _walk(parents, prims, goal_node)
    return STATUS_OK, ub_cost, prefix, (), stats


cdef inline long long _cell_key(double x, double y, double th,
                                double xmin, double ymin, double xy_res,
                                double hbin, int heading_bins,
                                long long ny) nogil:
    cdef long long ix = <long long> floor((x - xmin) / xy_res)
    cdef long long iy = <long long> floor((y - ymin) / xy_res)
    cdef long long it = (<long long> floor(th / hbin + 0.5)) % heading_bins
    if it < 0:
        it += heading_bins
    return (ix * ny + iy) * heading_bins + it


cdef inline double _heur(double x, double y, double th,
                         double gx, double gy, double gth,
                         double rl, double rr, double mu_min,
                         bint analytic_completion, double slack_len,
                         double goal_heading_tol) nogil:
    cdef double d = c_dubins_length(x, y, th, gx, gy, gth, rl, rr)
    cdef double dth = fabs(remainder(th - gth, TWO_PI))
    cdef double h, extra
    if analytic_completion:
        return d + mu_min * dth
    h = d - slack_len
    if h < 0.0:
        h = 0.0
    extra = dth - goal_heading_tol
    if extra > 0.0:
        h += mu_min * extra
    return h


cdef list _walk(vector[int]& parents, vector[int]& prims, long long nid):
    cdef list out = []
    while nid > 0:
        out.append(prims[<size_t> nid])
        nid = parents[<size_t> nid]
    out.reverse()
    return out
