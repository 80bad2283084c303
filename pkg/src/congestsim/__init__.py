"""CONGEST-model testbed for approximate weighted diameter/radius.

Exact graph oracles, a deterministic bandwidth-limited round engine, the
bounded-hop shortest-path pipeline, a cost-accounted randomized extremum
search standing in for quantum maximum finding, and generators plus
brute-force verifiers for the lower-bound gadget graphs.
"""

__version__ = "0.1.0"

from .graphs import (
    INFINITE,
    DisconnectedGraphError,
    GraphError,
    WeightedGraph,
    contract_unit_edges,
    diameter,
    eccentricity,
    exact_bounded_hop,
    exact_sssp,
    hop_diameter,
    radius,
)
from .engine import (
    BandwidthExceeded,
    CostLedger,
    MaxRoundsExceeded,
    Network,
    NodeProgram,
)
from .toolkit import (
    CongestionFailure,
    SkeletonState,
    approx_distance,
    approx_eccentricity,
    bounded_distance_sssp,
    bounded_hop_mssp,
    bounded_hop_sssp,
    build_skeleton_state,
    default_eps,
    embed_overlay,
    sssp_on_overlay,
)
from .search import (
    IterationBudgetExceeded,
    LowConfidenceResult,
    ParameterSchedule,
    SearchTrace,
    amplified_max_search,
    approx_diameter,
    approx_radius,
    evaluate_f_i,
)
from .gadgets import (
    GadgetInstance,
    build_gadget,
    eval_F,
    eval_F_prime,
    gdt,
    ownership_schedule,
    validate_schedule,
    ver,
    verify_reduction,
)

__all__ = [name for name in dir() if not name.startswith("_")]
