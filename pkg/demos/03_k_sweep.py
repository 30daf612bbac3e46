"""A small paired experiment across K, with SVG charts of the three metrics.

The same experiment at full size is `nk-muddle run specs/paper_default.json`.
"""

from pathlib import Path

from nkmuddle.experiments import ExperimentSpec, paired_difference, run_experiment
from nkmuddle.io import write_result
from nkmuddle.plotting import PlotSpec, plot

out = Path("demo_out/k_sweep")
spec = ExperimentSpec(
    n=20,
    k_values=(0, 2, 4, 8, 12, 15),
    algorithms=("sa", "cs", "pu", "mt:4:1"),
    master_seed=2020,
    replications=40,
)
result = run_experiment(spec)
write_result(result, out)

print(f"{'K':>3} {'algorithm':>8} {'fitness':>8} {'hamming':>8} {'evals':>8}")
for a in result.aggregates:
    print(f"{a.k:3d} {a.algorithm:>8} {a.fitness_mean:8.4f} {a.hamming_mean:8.2f} {a.evaluations_mean:8.0f}")

# Paired differences: every algorithm saw the same landscape and start.
for k in (4, 15):
    m, se = paired_difference(result.records, k, "mt:4:1", "sa")
    print(f"K={k}: MT - SA = {m:+.4f} +- {se:.4f}")

for metric in ("fitness", "hamming", "evaluations"):
    path = plot(PlotSpec(metric, spec.algorithms, out / "aggregates.csv", out / f"{metric}.svg"))
    print("wrote", path)
