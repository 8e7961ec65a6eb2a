"""Exact and Monte Carlo tooling for one-dimensional ±1 spin chains with
site-dependent nearest-neighbor couplings.

The interesting regime is couplings that grow with distance from the
origin: long minus-runs then cost energy proportional to their length,
the usual one-dimensional entropy argument fails, and the plus and minus
boundary conditions keep visibly different origin magnetizations at
every volume -- a phase-transition signature this package computes
exactly and samples stochastically.
"""

from .contours import (
    ContourDecomposition,
    PeierlsVerdict,
    configuration_from_blocks,
    contour_cost,
    decompose,
    enumerate_blocks,
    erase_block,
    verify_peierls,
)
from .exact import (
    block_probability,
    log_partition,
    magnetization_gap,
    max_run_distribution,
    max_run_tail,
    origin_minus_upper_bound,
    run_capped_log_partition,
    run_length_threshold,
    site_marginal,
)
from .mcmc import (
    ChainState,
    EstimateRecord,
    estimate_marginal,
    glauber_sweep,
    heat_bath_flip_probability,
    initial_state,
)
from .model import (
    Block,
    Configuration,
    CouplingProfile,
    Volume,
    flip_boundary,
    growth_condition_violations,
    total_energy,
)
from .oracle import MAX_ENUM_N, EnumerationResult, enumerate_all

__version__ = "0.1.0"

__all__ = [
    "Block",
    "ChainState",
    "Configuration",
    "ContourDecomposition",
    "CouplingProfile",
    "EnumerationResult",
    "EstimateRecord",
    "MAX_ENUM_N",
    "PeierlsVerdict",
    "Volume",
    "block_probability",
    "configuration_from_blocks",
    "contour_cost",
    "decompose",
    "enumerate_all",
    "enumerate_blocks",
    "erase_block",
    "estimate_marginal",
    "flip_boundary",
    "glauber_sweep",
    "growth_condition_violations",
    "heat_bath_flip_probability",
    "initial_state",
    "log_partition",
    "magnetization_gap",
    "max_run_distribution",
    "max_run_tail",
    "origin_minus_upper_bound",
    "run_capped_log_partition",
    "run_length_threshold",
    "site_marginal",
    "total_energy",
    "verify_peierls",
]
