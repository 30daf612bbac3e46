"""Muddling-through knobs: cluster count, moves of up to two flips, acceptance scope."""

from nkmuddle.experiments import ExperimentSpec, paired_difference, run_experiment

variants = (
    "mt:4:1",
    "mt:6:1",  # six clusters
    "mt:4:2",  # up to two flips inside one cluster per move
    "mt:4:1:whole_cluster",  # focal node counted in the acceptance sum
    "mt:4:1:comembers_excluding_focal:seeded_random",  # shuffled cluster membership
)
spec = ExperimentSpec(n=20, k_values=(4, 12), algorithms=variants, master_seed=7, replications=40)
result = run_experiment(spec)

for a in result.aggregates:
    print(f"K={a.k:2d} {a.algorithm:48s} fitness {a.fitness_mean:.4f} +- {a.fitness_se:.4f}  budget used in {1 - a.local_stop_fraction:.0%}")

for other in variants[1:]:
    m, se = paired_difference(result.records, 12, other, "mt:4:1")
    print(f"K=12 {other} vs mt:4:1: {m:+.4f} +- {se:.4f}")
