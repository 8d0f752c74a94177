"""Exact matchings and fractional vertex covers of step graphons."""

from .core import (
    CapacityError,
    PolytonError,
    SampledGraph,
    StepCover,
    StepGraphon,
    StepKernel,
    ValidationError,
    common_refinement,
    l1_distance,
)
from .covers import (
    build_phi,
    build_psi,
    cover_ratio,
    decompose_cover,
    eg_check,
    eg_lower_bound,
    extreme_covers,
    in_integral_cover_hull,
    is_cover,
    maxg,
)
from .cutnorm import cut_distance_blocks, cut_norm, cut_norm_lower_bound
from .matchings import degree_profile, is_matching, matching_ratio, matching_size
from .sampling import convergence_experiment, graph_to_stepgraphon, sample_wrandom
from .structure import FiniteGraph, density, is_bipartite, is_k_partite, odd_cycle_density
from .transfer import equal_measure_refinement, plan_transfer, transfer_matching, truncate_matching

__version__ = "0.1.0"
