import dataclasses
import random

import numpy as np
import pytest

from nkmuddle.experiments import (
    AlgorithmSpec,
    ExperimentSpec,
    ReplicationError,
    SpecError,
    aggregate,
    derive_seed,
    derive_streams,
    paired_difference,
    run_experiment,
    run_replication,
)
from nkmuddle.landscape import build_landscape, total_fitness
from nkmuddle.search import DEFAULT_TAU_GRID, WHOLE_CLUSTER


def small_spec(**kw):
    base = dict(n=12, k_values=(0, 4), algorithms=("sa", "cs", "pu:0.3,0.7", "mt:3:1"), master_seed=3, replications=4, budget=200)
    base.update(kw)
    return ExperimentSpec(**base)


def test_streams_deterministic():
    a = derive_streams(1, 2, 3, "mt:4:1", "search").random(8)
    b = derive_streams(1, 2, 3, "mt:4:1", "search").random(8)
    assert np.array_equal(a, b)


def test_streams_domain_separation():
    assert derive_seed(1, 0, 8, "sa", "landscape") == derive_seed(1, 0, 8, "mt:4:1", "landscape")
    assert derive_seed(1, 0, 8, "sa", "init") == derive_seed(1, 0, 8, None, "init")
    s1 = derive_streams(1, 0, 8, "cs", "search").random(4)
    s2 = derive_streams(1, 0, 8, "mt:4:1", "search").random(4)
    assert not np.array_equal(s1, s2)
    assert derive_seed(1, 0, 8, None, "landscape") != derive_seed(1, 0, 9, None, "landscape")
    assert derive_seed(1, 0, 8, None, "landscape") != derive_seed(1, 1, 8, None, "landscape")
    assert derive_seed(1, 0, 8, None, "landscape") != derive_seed(2, 0, 8, None, "landscape")


def test_landscape_seeds_collision_free():
    seeds = {derive_seed(7, r, 8, None, "landscape") for r in range(10_000)}
    assert len(seeds) == 10_000


def test_descriptor_parsing():
    assert AlgorithmSpec.parse("sa").kind == "sa"
    assert AlgorithmSpec.parse("pu").tau_grid == DEFAULT_TAU_GRID
    assert AlgorithmSpec.parse("pu:0.25,0.5").tau_grid == (0.25, 0.5)
    mt = AlgorithmSpec.parse("mt:6:2:whole_cluster:seeded_random")
    assert (mt.clusters, mt.max_changes, mt.scope, mt.partition_mode) == (6, 2, WHOLE_CLUSTER, "seeded_random")
    for bad in ["ga", "sa:1", "pu:1.5", "pu:", "mt:4", "mt:4:3", "mt:4:1:nope", "mt:4:1:whole_cluster:odd"]:
        with pytest.raises(ValueError):
            AlgorithmSpec.parse(bad)


def test_spec_validation():
    with pytest.raises(SpecError, match=r"k_values\[1\]"):
        small_spec(k_values=(0, 12))
    with pytest.raises(SpecError, match=r"algorithms\[0\]"):
        small_spec(algorithms=("mt:7:1",))
    with pytest.raises(SpecError, match="replications"):
        small_spec(replications=0)
    with pytest.raises(SpecError, match="algorithms"):
        small_spec(algorithms=())


def test_spec_defaults_and_round_trip():
    spec = ExperimentSpec.from_dict({"n": 20, "k_values": [8], "algorithms": ["mt:4:1"], "master_seed": 1})
    assert (spec.budget, spec.replications, spec.scheme) == (1000, 500, "random")
    assert AlgorithmSpec.parse(spec.algorithms[0]).scope == "comembers_excluding_focal"
    assert ExperimentSpec.from_dict(spec.to_dict()) == spec


def test_spec_unknown_key():
    with pytest.raises(SpecError, match="^tau"):
        ExperimentSpec.from_dict({"k_values": [1], "algorithms": ["sa"], "master_seed": 1, "tau": 0.5})


def test_replication_is_paired():
    spec = small_spec()
    recs, _, _ = run_replication(spec, 0, 4)
    assert [r.algorithm for r in recs] == list(spec.algorithms)
    assert len({r.fingerprint for r in recs}) == 1
    assert len({r.landscape_seed for r in recs}) == 1


def test_k0_sa_cs_agree():
    spec = small_spec(k_values=(0,))
    for rep in range(5):
        recs, _, _ = run_replication(spec, rep, 0)
        by = {r.algorithm: r for r in recs}
        assert by["sa"].best_fitness == by["cs"].best_fitness


def test_replication_replays():
    spec = ExperimentSpec(n=20, k_values=(15,), algorithms=("mt:4:1",), master_seed=9, replications=1)
    a, _, _ = run_replication(spec, 0, 15)
    b, _, _ = run_replication(spec, 0, 15)
    assert a == b


def test_adding_an_algorithm_does_not_perturb_others():
    a = run_experiment(small_spec(algorithms=("cs",)))
    b = run_experiment(small_spec(algorithms=("sa", "cs", "mt:3:2")))
    cs_b = [r for r in b.records if r.algorithm == "cs"]
    assert a.records == cs_b


def test_error_annotation(monkeypatch):
    from nkmuddle import experiments

    def boom(*a, **k):
        raise ValueError("bad thing")

    monkeypatch.setattr(experiments.search, "steepest_ascent", boom)
    with pytest.raises(ReplicationError, match=r"replication 2, k=4, algorithm 'sa'"):
        run_replication(small_spec(), 2, 4)


def test_single_record_aggregate():
    res = run_experiment(small_spec(k_values=(4,), algorithms=("cs",), replications=1))
    (agg,) = res.aggregates
    (rec,) = res.records
    assert agg.count == 1
    assert agg.fitness_mean == rec.best_fitness
    assert agg.hamming_mean == rec.hamming
    assert agg.evaluations_mean == rec.evaluations
    assert agg.fitness_se == 0.0


def test_aggregate_statistics_two_pass():
    res = run_experiment(small_spec(replications=9))
    for agg in res.aggregates:
        vals = np.array([r.best_fitness for r in res.records if r.k == agg.k and r.algorithm == agg.algorithm])
        assert agg.count == len(vals) == 9
        assert agg.fitness_mean == pytest.approx(vals.mean(), abs=1e-14)
        assert agg.fitness_se == pytest.approx(vals.std(ddof=1) / 3, abs=1e-14)
        assert vals.min() <= agg.fitness_mean <= vals.max()


def test_aggregate_order_independent():
    res = run_experiment(small_spec(replications=6))
    shuffled = res.records[:]
    random.Random(0).shuffle(shuffled)
    assert aggregate(shuffled, res.spec.algorithms) == res.aggregates


def test_worker_count_does_not_matter():
    spec = small_spec(replications=3)
    a, b = run_experiment(spec, 1), run_experiment(spec, 3)
    assert a.records == b.records
    assert a.aggregates == b.aggregates


def test_larger_budget_never_hurts_means():
    small = run_experiment(small_spec(budget=20, replications=6))
    large = run_experiment(dataclasses.replace(small.spec, budget=400))
    for a, b in zip(small.aggregates, large.aggregates):
        assert (a.k, a.algorithm) == (b.k, b.algorithm)
        assert b.fitness_mean >= a.fitness_mean - 1e-15


def test_normalized_fitness():
    res = run_experiment(small_spec(replications=2), normalize=True)
    assert len(res.oracle) == 2 * 2
    for r in res.records:
        rep = res.oracle[(r.replication, r.k)]
        ls = build_landscape(r.landscape_seed, 12, r.k)
        assert rep.global_max_fitness == total_fitness(ls, rep.global_max_config)
        assert r.normalized_fitness == r.best_fitness / rep.global_max_fitness
        assert r.normalized_fitness <= 1.0
    assert all(a.normalized_fitness_mean is not None for a in res.aggregates)


def test_paired_difference():
    res = run_experiment(small_spec(replications=5))
    m, se = paired_difference(res.records, 4, "sa", "cs")
    sa = {r.replication: r.best_fitness for r in res.records if r.k == 4 and r.algorithm == "sa"}
    cs = {r.replication: r.best_fitness for r in res.records if r.k == 4 and r.algorithm == "cs"}
    d = np.array([sa[i] - cs[i] for i in range(5)])
    assert m == pytest.approx(d.mean(), abs=1e-15)
    assert se == pytest.approx(d.std(ddof=1) / np.sqrt(5), abs=1e-15)
    with pytest.raises(ValueError):
        paired_difference(res.records, 3, "sa", "cs")


def test_traces_collected():
    res = run_experiment(small_spec(replications=1, k_values=(4,)), trace=True)
    algos = {t[2] for t in res.traces}
    assert algos == set(res.spec.algorithms)
    assert all(len(t) == 8 for t in res.traces)
