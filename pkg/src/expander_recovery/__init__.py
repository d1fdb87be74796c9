"""Sparse nonnegative recovery over biregular bipartite expander graphs:
a bound-tightening message-passing decoder plus the structural machinery
(expansion certification, max-flow matchings, peeling diagnostics) and
brute-force oracles needed to verify its guarantees at desk scale.
"""

from .analysis import (
    DeltaMatching,
    MinCut,
    PeelingDecomposition,
    boundary_set,
    find_delta_matching,
    peel_layers,
    verify_matching,
)
from .decoder import (
    DecoderState,
    RecoveryResult,
    RoundStats,
    decode,
    default_tolerance,
    init_state,
    measure,
    step_round,
)
from .errors import BudgetExceededError, ConstructionError, InputError
from .graph import (
    BipartiteGraph,
    ExpansionReport,
    build_random_biregular,
    check_expansion,
    dense_matrix,
    gamma,
    unique_neighbors,
)
from .harness import (
    ExperimentConfig,
    ExperimentSummary,
    TrialRecord,
    approx_recovery_expansion_size,
    default_round_budget,
    exact_recovery_expansion_size,
    find_certified_graph,
    load_config,
    run_approx_experiment,
    run_exact_experiment,
    run_experiment,
)
from .oracle import (
    SparseApproximation,
    best_k_sparse,
    brute_force_recover,
    guarantee_multiplier,
    l1_error,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph",
    "ExpansionReport",
    "build_random_biregular",
    "check_expansion",
    "dense_matrix",
    "gamma",
    "unique_neighbors",
    "DecoderState",
    "RecoveryResult",
    "RoundStats",
    "decode",
    "default_tolerance",
    "init_state",
    "measure",
    "step_round",
    "DeltaMatching",
    "MinCut",
    "PeelingDecomposition",
    "boundary_set",
    "find_delta_matching",
    "verify_matching",
    "peel_layers",
    "SparseApproximation",
    "best_k_sparse",
    "brute_force_recover",
    "l1_error",
    "guarantee_multiplier",
    "ExperimentConfig",
    "ExperimentSummary",
    "TrialRecord",
    "approx_recovery_expansion_size",
    "default_round_budget",
    "exact_recovery_expansion_size",
    "find_certified_graph",
    "load_config",
    "run_approx_experiment",
    "run_exact_experiment",
    "run_experiment",
    "BudgetExceededError",
    "ConstructionError",
    "InputError",
]
