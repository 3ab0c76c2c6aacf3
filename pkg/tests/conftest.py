"""Shared helpers for the test suite."""

import math

import numpy as np

from wmdubins import Configuration, VehicleSpec


def random_instance(rng, box=10.0, r_range=(0.5, 2.0), mu_range=(0.0, 2.0)):
    """One random planning instance: (start, goal, spec).

    Start is a random pose so frame-invariance bugs cannot hide behind a
    canonical start; goal is uniform in a box around it.
    """
    half = 0.5 * box
    sx, sy = rng.uniform(-half, half, 2)
    sth = rng.uniform(0.0, 2.0 * math.pi)
    gx, gy = rng.uniform(-half, half, 2)
    gth = rng.uniform(0.0, 2.0 * math.pi)
    rl, rr = rng.uniform(r_range[0], r_range[1], 2)
    mul, mur = rng.uniform(mu_range[0], mu_range[1], 2)
    start = Configuration(sx, sy, sth)
    goal = Configuration(sx + gx, sy + gy, gth)
    spec = VehicleSpec(rl, rr, mul, mur)
    return start, goal, spec


def assert_angles_close(a, b, tol=1e-9):
    d = (a - b) % (2.0 * math.pi)
    if d > math.pi:
        d -= 2.0 * math.pi
    assert abs(d) <= tol, f"angles differ: {a} vs {b} (wrapped delta {d})"


def seeded_rng(seed):
    return np.random.default_rng(seed)
