"""Building an NK landscape and looking at it from a few angles."""

import numpy as np

from nkmuddle import build_landscape, contribution_profile, flip_node, total_fitness
from nkmuddle.oracle import brute_force_optimum

# N=12 nodes, each coupled to K=3 others chosen at random.
ls = build_landscape(seed=7, n=12, k=3)
print("partners of node 0:", ls.neighbors[0].tolist())
print("fitness matrix shape:", ls.fitness_matrix.shape)  # 2^(K+1) rows, one column per node

# A configuration is just a bit vector; fitness is the mean node contribution.
config = np.array([1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0])
profile = contribution_profile(ls, config)
print("contributions:", np.round(profile, 3))
print("fitness:", total_fitness(ls, config))

# Flipping one node changes its own contribution and those of every node
# that lists it as a partner.
flipped = flip_node(config, 4)
changed = np.flatnonzero(contribution_profile(ls, flipped) != profile)
print("flipping node 4 changes nodes", changed.tolist(), "== dependents", ls.dependents[4])

# At this size we can afford to look at all 4096 configurations.
report = brute_force_optimum(ls)
print("global max", report.global_max_fitness, "at", report.global_max_config.tolist())
print("local optima:", report.local_optima_count)

# Ruggedness grows quickly with K.
for k in (0, 2, 5, 11):
    counts = [brute_force_optimum(build_landscape(s, 12, k)).local_optima_count for s in range(20)]
    print(f"K={k:2d}: mean local optima over 20 landscapes = {np.mean(counts):.1f}")
