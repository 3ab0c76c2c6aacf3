"""Benchmark the lattice oracle's compiled kernel against the pure-Python one.

Runs the same searches through both backends and reports wall time and the
node counts (which must match exactly; the kernels are transliterations).

    python benchmarks/bench_lattice.py [--repeat N] [--heavy]
"""

import argparse
import math
import time

from wmdubins import Configuration, LatticeOptions, VehicleSpec, lattice_search
from wmdubins.oracle import HAVE_COMPILED_LATTICE

CASES = [
    (
        "turnaround",
        Configuration(0, 0, 0),
        Configuration(0, 0, math.pi),
        VehicleSpec(1.0, 1.0, 1.0, 1.0),
        dict(heading_bins=72, xy_resolution=0.1),
    ),
    (
        "asymmetric",
        Configuration(0, 0, 0),
        Configuration(3.0, 2.0, 2.2),
        VehicleSpec(1.0, 0.8, 0.6, 0.3),
        dict(heading_bins=144, xy_resolution=0.05),
    ),
    (
        "tolerance-goal",
        Configuration(0, 0, 0),
        Configuration(0, 0, math.pi),
        VehicleSpec(1.0, 1.0, 1.0, 1.0),
        dict(heading_bins=72, xy_resolution=0.1, analytic_completion=False),
    ),
]

HEAVY_CASES = [
    (
        "turnaround-fine",
        Configuration(0, 0, 0),
        Configuration(0, 0, math.pi),
        VehicleSpec(1.0, 1.0, 1.0, 1.0),
        dict(heading_bins=144, xy_resolution=0.05),
    ),
]


def run_case(name, start, goal, spec, knobs, backend, repeat):
    opts = LatticeOptions(backend=backend, **knobs)
    stats: dict = {}
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        cost, _ = lattice_search(start, goal, spec, opts, stats=stats)
        best = min(best, time.perf_counter() - t0)
    return cost, stats.get("nodes", 0), stats.get("expanded", 0), best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3, help="timing repetitions, best-of")
    ap.add_argument("--heavy", action="store_true", help="include the fine-grid case")
    args = ap.parse_args()

    if not HAVE_COMPILED_LATTICE:
        print("compiled kernel not available; build the extension first")
        return 1

    cases = CASES + (HEAVY_CASES if args.heavy else [])
    header = f"{'case':<16} {'nodes':>8} {'python':>10} {'compiled':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, start, goal, spec, knobs in cases:
        c_py, n_py, e_py, t_py = run_case(name, start, goal, spec, knobs, "python", args.repeat)
        c_cc, n_cc, e_cc, t_cc = run_case(name, start, goal, spec, knobs, "compiled", args.repeat)
        if not (n_py == n_cc and e_py == e_cc and abs(c_py - c_cc) <= 1e-9):
            print(f"{name:<16} BACKEND MISMATCH: "
                  f"cost {c_py} vs {c_cc}, nodes {n_py} vs {n_cc}")
            return 1
        print(f"{name:<16} {n_py:>8} {t_py:>9.3f}s {t_cc:>9.3f}s {t_py / t_cc:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
