"""Forward kinematics for L/R/S segment sequences.

Scalar functions propagate exact closed-form poses; the array variants
vectorize over batches of measure vectors for the multi-start solvers and
also provide the analytic Jacobian of the endpoint w.r.t. the measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    Configuration,
    Segment,
    VehicleSpec,
    path_cost,
    segment_cost,
    wrap_to_pi,
)


def propagate_segment(c: Configuration, segment: Segment, spec: VehicleSpec) -> Configuration:
    """Pose after driving one segment from c."""
    th = c.heading
    m = segment.measure
    if segment.kind == "L":
        r = spec.radius_left
        th2 = th + m
        return Configuration(
            c.x + r * (math.sin(th2) - math.sin(th)),
            c.y + r * (math.cos(th) - math.cos(th2)),
            th2,
        )
    if segment.kind == "R":
        r = spec.radius_right
        th2 = th - m
        return Configuration(
            c.x + r * (math.sin(th) - math.sin(th2)),
            c.y + r * (math.cos(th2) - math.cos(th)),
            th2,
        )
    return Configuration(c.x + m * math.cos(th), c.y + m * math.sin(th), th)


def propagate_path(c: Configuration, segments, spec: VehicleSpec) -> Configuration:
    """Pose after driving all segments in order from c."""
    for seg in segments:
        c = propagate_segment(c, seg, spec)
    return c


def closure_residual(
    start: Configuration, goal: Configuration, segments, spec: VehicleSpec
) -> tuple[float, float, float]:
    """(dx, dy, dheading) between the propagated endpoint and the goal.

    dheading is wrapped to (-pi, pi].
    """
    end = propagate_path(start, segments, spec)
    return (end.x - goal.x, end.y - goal.y, wrap_to_pi(end.heading - goal.heading))


@dataclass
class Polyline:
    """Sampled path: vertex positions with running cost and arc length."""

    points: list[tuple[float, float]] = field(default_factory=list)
    cumulative_cost: list[float] = field(default_factory=list)
    cumulative_length: list[float] = field(default_factory=list)


def sample_path(start: Configuration, segments, spec: VehicleSpec, step: float) -> Polyline:
    """Sample the path at arc-length increments of at most step.

    Every segment endpoint is a vertex; zero-measure segments contribute no
    extra vertices. Each vertex is computed in closed form from its segment
    start, so sampling does not accumulate error.
    """
    if not (math.isfinite(step) and step > 0.0):
        raise ValueError(f"step must be positive and finite, got {step!r}")
    poly = Polyline([start.position], [0.0], [0.0])
    pose = start
    cost = 0.0
    length = 0.0
    for seg in segments:
        if seg.measure == 0.0:
            continue
        if seg.kind == "L":
            seg_len = spec.radius_left * seg.measure
        elif seg.kind == "R":
            seg_len = spec.radius_right * seg.measure
        else:
            seg_len = seg.measure
        seg_cost = segment_cost(seg, spec)
        n = max(1, math.ceil(seg_len / step))
        for i in range(1, n + 1):
            f = i / n
            p = propagate_segment(pose, Segment(seg.kind, seg.measure * f), spec)
            poly.points.append(p.position)
            poly.cumulative_cost.append(cost + seg_cost * f)
            poly.cumulative_length.append(length + seg_len * f)
        pose = propagate_segment(pose, seg, spec)
        cost += seg_cost
        length += seg_len
    return poly


def propagate_array(kinds: str, measures: np.ndarray, spec: VehicleSpec):
    """Vectorized endpoint of a fixed kind word with batched measures.

    measures has shape (..., len(kinds)); returns (x, y, heading) arrays of
    shape (...,). Heading is unwrapped (raw accumulated turn).
    """
    measures = np.asarray(measures, dtype=float)
    shape = measures.shape[:-1]
    x = np.zeros(shape)
    y = np.zeros(shape)
    h = np.zeros(shape)
    for k, kind in enumerate(kinds):
        m = measures[..., k]
        if kind == "L":
            r = spec.radius_left
            h2 = h + m
            x = x + r * (np.sin(h2) - np.sin(h))
            y = y + r * (np.cos(h) - np.cos(h2))
            h = h2
        elif kind == "R":
            r = spec.radius_right
            h2 = h - m
            x = x + r * (np.sin(h) - np.sin(h2))
            y = y + r * (np.cos(h2) - np.cos(h))
            h = h2
        else:
            x = x + m * np.cos(h)
            y = y + m * np.sin(h)
    return x, y, h


def propagate_array_jacobian(kinds: str, measures: np.ndarray, spec: VehicleSpec):
    """Endpoint plus analytic Jacobian w.r.t. each measure.

    Returns (x, y, h, jx, jy, hsign): jx/jy have shape (..., n) with the
    partial derivatives of the endpoint position, hsign is the constant
    (n,) vector of dheading/dmeasure (+1 for L, -1 for R, 0 for S).

    Growing segment k moves the endpoint along the tangent at the end of
    segment k and rotates everything downstream about that junction.
    """
    measures = np.asarray(measures, dtype=float)
    n = len(kinds)
    shape = measures.shape[:-1]
    x = np.zeros(shape)
    y = np.zeros(shape)
    h = np.zeros(shape)
    xs = np.empty(shape + (n,))
    ys = np.empty(shape + (n,))
    hs = np.empty(shape + (n,))
    for k, kind in enumerate(kinds):
        m = measures[..., k]
        if kind == "L":
            r = spec.radius_left
            h2 = h + m
            x = x + r * (np.sin(h2) - np.sin(h))
            y = y + r * (np.cos(h) - np.cos(h2))
            h = h2
        elif kind == "R":
            r = spec.radius_right
            h2 = h - m
            x = x + r * (np.sin(h) - np.sin(h2))
            y = y + r * (np.cos(h2) - np.cos(h))
            h = h2
        else:
            x = x + m * np.cos(h)
            y = y + m * np.sin(h)
        xs[..., k] = x
        ys[..., k] = y
        hs[..., k] = h
    jx = np.empty(shape + (n,))
    jy = np.empty(shape + (n,))
    hsign = np.zeros(n)
    for k, kind in enumerate(kinds):
        ch = np.cos(hs[..., k])
        sh = np.sin(hs[..., k])
        lever_x = x - xs[..., k]
        lever_y = y - ys[..., k]
        if kind == "L":
            r = spec.radius_left
            jx[..., k] = r * ch - lever_y
            jy[..., k] = r * sh + lever_x
            hsign[k] = 1.0
        elif kind == "R":
            r = spec.radius_right
            jx[..., k] = r * ch + lever_y
            jy[..., k] = r * sh - lever_x
            hsign[k] = -1.0
        else:
            jx[..., k] = ch
            jy[..., k] = sh
    return x, y, h, jx, jy, hsign


KIND_CODES = {"L": 0, "R": 1, "S": 2}


def propagate_coded_jacobian(codes: np.ndarray, measures: np.ndarray, spec: VehicleSpec):
    """propagate_array_jacobian for per-lane kind codes (0=L, 1=R, 2=S).

    codes and measures share the shape (..., n), so one call can advance a
    batch that mixes different kind words of equal length. hsign comes back
    with shape (..., n) here since it varies per lane.
    """
    measures = np.asarray(measures, dtype=float)
    codes = np.broadcast_to(np.asarray(codes, dtype=np.int8), measures.shape)
    n = measures.shape[-1]
    shape = measures.shape[:-1]
    rl = spec.radius_left
    rr = spec.radius_right
    x = np.zeros(shape)
    y = np.zeros(shape)
    h = np.zeros(shape)
    xs = np.empty(shape + (n,))
    ys = np.empty(shape + (n,))
    hs = np.empty(shape + (n,))
    for k in range(n):
        m = measures[..., k]
        c = codes[..., k]
        is_l = c == 0
        is_r = c == 1
        h2 = np.where(is_l, h + m, np.where(is_r, h - m, h))
        sin_h, cos_h = np.sin(h), np.cos(h)
        sin_h2, cos_h2 = np.sin(h2), np.cos(h2)
        dx = np.where(
            is_l,
            rl * (sin_h2 - sin_h),
            np.where(is_r, rr * (sin_h - sin_h2), m * cos_h),
        )
        dy = np.where(
            is_l,
            rl * (cos_h - cos_h2),
            np.where(is_r, rr * (cos_h2 - cos_h), m * sin_h),
        )
        x = x + dx
        y = y + dy
        h = h2
        xs[..., k] = x
        ys[..., k] = y
        hs[..., k] = h
    jx = np.empty(shape + (n,))
    jy = np.empty(shape + (n,))
    for k in range(n):
        c = codes[..., k]
        is_l = c == 0
        is_r = c == 1
        ch = np.cos(hs[..., k])
        sh = np.sin(hs[..., k])
        lever_x = x - xs[..., k]
        lever_y = y - ys[..., k]
        jx[..., k] = np.where(
            is_l, rl * ch - lever_y, np.where(is_r, rr * ch + lever_y, ch)
        )
        jy[..., k] = np.where(
            is_l, rl * sh + lever_x, np.where(is_r, rr * sh - lever_x, sh)
        )
    hsign = np.where(codes == 0, 1.0, np.where(codes == 1, -1.0, 0.0))
    return x, y, h, jx, jy, hsign


def coded_cost_rates(codes: np.ndarray, spec: VehicleSpec) -> np.ndarray:
    """Per-measure cost rates for integer kind codes (broadcasts with codes)."""
    codes = np.asarray(codes, dtype=np.int8)
    return np.where(
        codes == 0,
        spec.cost_rate_left,
        np.where(codes == 1, spec.cost_rate_right, 1.0),
    )


def cost_vector(kinds: str, spec: VehicleSpec) -> np.ndarray:
    """Per-measure cost rates for a kind word (the cost is their dot product)."""
    rates = {
        "L": spec.cost_rate_left,
        "R": spec.cost_rate_right,
        "S": 1.0,
    }
    return np.array([rates[k] for k in kinds])


__all__ = [
    "Polyline",
    "propagate_segment",
    "propagate_path",
    "closure_residual",
    "sample_path",
    "propagate_array",
    "propagate_array_jacobian",
    "propagate_coded_jacobian",
    "coded_cost_rates",
    "KIND_CODES",
    "cost_vector",
    "path_cost",
]
