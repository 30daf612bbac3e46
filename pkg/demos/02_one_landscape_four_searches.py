"""Four searches from the same start on one rugged landscape (N=20, K=15)."""

import numpy as np

from nkmuddle import (
    MtParams,
    build_cluster_partition,
    build_landscape,
    centralized_search,
    muddling_through,
    parallel_update_sweep,
    random_initial_config,
    steepest_ascent,
    total_fitness,
)

ls = build_landscape(seed=42, n=20, k=15)
init = random_initial_config(np.random.default_rng(0), 20)
print(f"start fitness {total_fitness(ls, init):.4f}")

runs = {
    "steepest ascent": steepest_ascent(ls, init, 1000),
    "centralized": centralized_search(ls, init, 1000, np.random.default_rng(1)),
    "parallel (tau sweep)": parallel_update_sweep(
        ls, init, 1000, rngs=[np.random.default_rng([2, i]) for i in range(9)]
    ),
    "muddling through": muddling_through(
        ls, init, 1000, MtParams(build_cluster_partition(20, 4)), np.random.default_rng(3), trace=True
    ),
}
for name, out in runs.items():
    print(
        f"{name:22s} best {out.best_fitness:.4f}  hamming {out.hamming_init_to_best:2d}  "
        f"evals {out.evaluations:5d}  steps {out.steps_used:4d}  {out.termination}"
    )

# Muddling through is not monotone: it accepts moves that help the moved
# cluster's co-members even when total fitness drops.
mt = runs["muddling through"]
current = [row[3] for row in mt.trajectory if row[2]]
drops = sum(b < a for a, b in zip(current, current[1:]))
print(f"MT accepted {mt.moves} moves, {drops} of them lowered total fitness")
print("first accepted moves (step, nodes, fitness):", [(r[0], r[1], round(r[3], 4)) for r in mt.trajectory if r[2]][:5])
