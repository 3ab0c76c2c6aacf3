"""wmdubins: shortest paths for a forward-only vehicle whose left and right
turns may have different radii and different per-radian costs.

The planner enumerates the closed candidate families of the weighted
problem (up to five segments), solves each for the boundary conditions,
and returns the cheapest feasible path. A zero-penalty mode reduces to
the classical six-word Dubins set plus degenerates. The oracle module
provides independent brute-force cross-checks, and the CLI exposes
planning, sampling, SVG export, and randomized verification.
"""

from .families import LambdaParam, SolveOptions, WEIGHTED_FAMILIES
from .kinematics import (
    Polyline,
    closure_residual,
    propagate_path,
    propagate_segment,
    sample_path,
)
from .model import (
    Configuration,
    PathCandidate,
    PlanResult,
    Segment,
    VehicleSpec,
    path_cost,
    path_length,
)
from .oracle import (
    LatticeOptions,
    OracleReport,
    classical_dubins,
    enumerate_sequences,
    free_structure_solve,
    lattice_search,
    verify_instance,
)
from .planner import PlanRequest, cost_monotonicity_probe, plan

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "VehicleSpec",
    "Segment",
    "PathCandidate",
    "PlanResult",
    "PlanRequest",
    "SolveOptions",
    "LambdaParam",
    "WEIGHTED_FAMILIES",
    "Polyline",
    "plan",
    "cost_monotonicity_probe",
    "propagate_segment",
    "propagate_path",
    "closure_residual",
    "sample_path",
    "path_cost",
    "path_length",
    "LatticeOptions",
    "OracleReport",
    "lattice_search",
    "free_structure_solve",
    "enumerate_sequences",
    "classical_dubins",
    "verify_instance",
    "__version__",
]
