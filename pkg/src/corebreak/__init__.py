"""k-core structure analysis and targeted edge-deletion attacks on the innermost core."""

from .attack import (
    AttackBudgetEstimate,
    AttackResult,
    GainerSet,
    Strategy,
    budget_estimate,
    ckc_attack,
    core_attack,
    exhaustive_min_attack,
    gainer_set,
    greedy_core_attack,
    hde_attack,
    hdn_attack,
    red_attack,
    run_attack,
)
from .graph_core import (
    CoreDecomposition,
    CoronaSet,
    Graph,
    IncrementalCore,
    NoCoreError,
    ParseError,
    core_decompose,
    corona,
    delete_edges,
    innermost_core,
    k_core_subgraph,
    load_edge_list,
    neighbor_closure,
)
from .metrics import MetricsReport, QTrajectory, TrajectoryRecorder, compute_metrics, empirical_q
from .percolation import (
    DegreeDistribution,
    PercolationConfig,
    SweepMode,
    deletion_sweep,
    er_graph,
    q_fixed_point,
    q_kernel,
)

__version__ = "0.1.0"
