"""Core value types for the planner: poses, vehicle parameters, segments, results.

Angles are radians everywhere in the library; headings are stored normalized
to [0, 2*pi). Costs combine path length and turn effort: an arc of angle phi
costs (radius + turn_penalty) * phi, a straight of length l costs l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TAU = 2.0 * math.pi

# Segment measures at or below this are treated as degenerate (zero-length).
ZERO_MEASURE = 1e-9

# Combined turn penalty below this selects the classical (unpenalized) mode.
MU_CLASSICAL = 1e-12

SEGMENT_KINDS = ("L", "R", "S")


def normalize_angle(theta: float) -> float:
    """Map an angle to [0, 2*pi). Raises ValueError on non-finite input."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    r = math.fmod(theta, TAU)
    if r < 0.0:
        r += TAU
    if r >= TAU:  # fmod rounding can land exactly on 2*pi
        r = 0.0
    return r


def wrap_to_pi(theta: float) -> float:
    """Map an angle to (-pi, pi]."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    r = math.fmod(theta, TAU)
    if r > math.pi:
        r -= TAU
    elif r <= -math.pi:
        r += TAU
    return r


@dataclass(frozen=True)
class Configuration:
    """A planar pose (x, y, heading); heading is normalized on construction."""

    x: float
    y: float
    heading: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"position must be finite, got ({self.x!r}, {self.y!r})")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "heading", normalize_angle(float(self.heading)))

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class VehicleSpec:
    """Vehicle geometry and turn penalties.

    radius_left/radius_right are the minimum turning radii for the two turn
    directions; penalty_left/penalty_right are the per-radian turn penalties
    added on top of arc length.
    """

    radius_left: float
    radius_right: float
    penalty_left: float = 0.0
    penalty_right: float = 0.0

    def __post_init__(self):
        for name in ("radius_left", "radius_right"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
            object.__setattr__(self, name, v)
        for name in ("penalty_left", "penalty_right"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be non-negative and finite, got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def cost_rate_left(self) -> float:
        """Cost per radian of left turn."""
        return self.radius_left + self.penalty_left

    @property
    def cost_rate_right(self) -> float:
        """Cost per radian of right turn."""
        return self.radius_right + self.penalty_right

    @property
    def min_radius(self) -> float:
        return min(self.radius_left, self.radius_right)

    @property
    def is_classical(self) -> bool:
        """True when both turn penalties vanish (plain shortest-path Dubins)."""
        return self.penalty_left + self.penalty_right < MU_CLASSICAL


@dataclass(frozen=True)
class Segment:
    """One primitive motion: kind 'L'/'R' (arc angle, rad) or 'S' (length, m)."""

    kind: str
    measure: float

    def __post_init__(self):
        if self.kind not in SEGMENT_KINDS:
            raise ValueError(f"segment kind must be one of {SEGMENT_KINDS}, got {self.kind!r}")
        m = float(self.measure)
        if not math.isfinite(m) or m < 0.0:
            raise ValueError(f"segment measure must be finite and >= 0, got {m!r}")
        if self.kind != "S" and m >= TAU:
            raise ValueError(f"arc angle must lie in [0, 2*pi), got {m!r}")
        object.__setattr__(self, "measure", m)

    @property
    def is_arc(self) -> bool:
        return self.kind != "S"


def segment_cost(segment: Segment, spec: VehicleSpec) -> float:
    """Cost of one segment under the vehicle's rates."""
    if segment.kind == "L":
        return spec.cost_rate_left * segment.measure
    if segment.kind == "R":
        return spec.cost_rate_right * segment.measure
    return segment.measure


def path_cost(segments, spec: VehicleSpec) -> float:
    """Total cost of a segment sequence."""
    return sum(segment_cost(s, spec) for s in segments)


def path_length(segments, spec: VehicleSpec) -> float:
    """Geometric arc length of a segment sequence (penalties ignored)."""
    total = 0.0
    for s in segments:
        if s.kind == "L":
            total += spec.radius_left * s.measure
        elif s.kind == "R":
            total += spec.radius_right * s.measure
        else:
            total += s.measure
    return total


@dataclass(frozen=True)
class PathCandidate:
    """A solved candidate path for one family.

    family is the segment-kind word (e.g. "LSR"); segments holds the actual
    measures in order; residual is the (dx, dy, dheading) closure error of the
    re-propagated path against the goal.
    """

    family: str
    segments: tuple[Segment, ...]
    cost: float
    residual: tuple[float, float, float]

    def max_error(self, min_radius: float) -> float:
        """Scalar closure error: max(|dx|, |dy|, min_radius * |dheading|)."""
        dx, dy, dth = self.residual
        return max(abs(dx), abs(dy), min_radius * abs(dth))

    def active_segment_count(self, threshold: float = ZERO_MEASURE) -> int:
        """Number of non-degenerate segments."""
        return sum(1 for s in self.segments if s.measure > threshold)


@dataclass
class PlanResult:
    """Outcome of a plan() call: best candidate (None if no path) plus all
    feasible candidates and solver diagnostics."""

    best: PathCandidate | None
    all_candidates: list[PathCandidate] = field(default_factory=list)
    mode: str = "weighted"
    diagnostics: dict = field(default_factory=dict)


def to_canonical(start: Configuration, goal: Configuration) -> Configuration:
    """Express goal in the frame where start sits at the origin with heading 0."""
    dx = goal.x - start.x
    dy = goal.y - start.y
    c = math.cos(-start.heading)
    s = math.sin(-start.heading)
    return Configuration(
        c * dx - s * dy,
        s * dx + c * dy,
        goal.heading - start.heading,
    )


def from_canonical(start: Configuration, local: Configuration) -> Configuration:
    """Inverse of to_canonical: map a start-frame pose back to the world frame."""
    c = math.cos(start.heading)
    s = math.sin(start.heading)
    return Configuration(
        start.x + c * local.x - s * local.y,
        start.y + s * local.x + c * local.y,
        local.heading + start.heading,
    )


def mirror_configuration(c: Configuration) -> Configuration:
    """Reflect a pose across the x axis."""
    return Configuration(c.x, -c.y, -c.heading)


def mirror_vehicle(spec: VehicleSpec) -> VehicleSpec:
    """Swap the left/right roles of the vehicle parameters."""
    return VehicleSpec(
        radius_left=spec.radius_right,
        radius_right=spec.radius_left,
        penalty_left=spec.penalty_right,
        penalty_right=spec.penalty_left,
    )


def mirror_family(family: str) -> str:
    """Swap L and R in a family word."""
    return family.translate(str.maketrans("LR", "RL"))
