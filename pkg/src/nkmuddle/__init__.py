"""NK fitness landscapes and local search, including clustered "muddling through" search."""

from .landscape import (
    Landscape,
    build_landscape,
    contribution_profile,
    contribution_row_index,
    delta_fitness,
    flip_node,
    hamming_distance,
    node_contribution,
    total_fitness,
)
from .oracle import OracleReport, brute_force_optimum, is_local_optimum
from .search import (
    ClusterPartition,
    MtParams,
    PuParams,
    SearchBudget,
    SearchOutcome,
    build_cluster_partition,
    centralized_search,
    cluster_comember_aggregate,
    muddling_through,
    parallel_update,
    parallel_update_sweep,
    random_initial_config,
    steepest_ascent,
)

__version__ = "0.1.0"
