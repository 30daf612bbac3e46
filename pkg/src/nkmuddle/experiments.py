"""Paired batch experiments over many random landscapes.

Every ``(replication, k)`` cell builds one landscape and one initial
configuration from streams that depend only on ``(master_seed,
replication, k)``; all algorithms in the spec then run from that shared
start. Search streams additionally depend on the algorithm id, so adding or
removing an algorithm never perturbs the others.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import product

import numpy as np

from . import search
from .landscape import SCHEMES, Landscape, build_landscape
from .oracle import MAX_ORACLE_N, brute_force_optimum

DEFAULTS = {
    "n": 20,
    "budget": 1000,
    "replications": 500,
    "scheme": "random",
}
DEFAULT_K_VALUES = (0, 1, 2, 3, 4, 6, 8, 10, 12, 15, 19)


class SpecError(ValueError):
    """Invalid experiment specification; the message starts with the offending key path."""


class ReplicationError(RuntimeError):
    pass


@dataclass(frozen=True)
class AlgorithmSpec:
    """Parsed algorithm descriptor.

    Descriptor syntax: ``sa``, ``cs``, ``pu`` or ``pu:<tau>,<tau>,...``, and
    ``mt:<clusters>:<max_changes>[:<scope>[:<partition_mode>]]``. The
    descriptor string itself is the algorithm id in every output.
    """

    descriptor: str
    kind: str
    tau_grid: tuple[float, ...] = ()
    clusters: int = 0
    max_changes: int = 1
    scope: str = search.EXCLUDE_FOCAL
    partition_mode: str = "contiguous"

    @classmethod
    def parse(cls, descriptor: str) -> AlgorithmSpec:
        parts = descriptor.strip().split(":")
        kind = parts[0].lower()
        if kind in ("sa", "cs"):
            if len(parts) != 1:
                raise ValueError(f"{kind!r} takes no parameters")
            return cls(descriptor, kind)
        if kind == "pu":
            if len(parts) > 2:
                raise ValueError("expected 'pu' or 'pu:<tau>,<tau>,...'")
            grid = search.DEFAULT_TAU_GRID
            if len(parts) == 2:
                grid = tuple(float(t) for t in parts[1].split(",") if t.strip())
            if not grid:
                raise ValueError("tau list must not be empty")
            for t in grid:
                search.PuParams(t)
            return cls(descriptor, kind, tau_grid=grid)
        if kind == "mt":
            if not 3 <= len(parts) <= 5:
                raise ValueError("expected 'mt:<clusters>:<max_changes>[:<scope>[:<partition_mode>]]'")
            clusters, max_changes = int(parts[1]), int(parts[2])
            scope = parts[3] if len(parts) > 3 else search.EXCLUDE_FOCAL
            mode = parts[4] if len(parts) > 4 else "contiguous"
            if max_changes not in (1, 2):
                raise ValueError(f"max_changes must be 1 or 2, got {max_changes}")
            if scope not in search.SCOPES:
                raise ValueError(f"scope must be one of {search.SCOPES}, got {scope!r}")
            if mode not in ("contiguous", "seeded_random"):
                raise ValueError(f"partition mode must be 'contiguous' or 'seeded_random', got {mode!r}")
            return cls(descriptor, kind, clusters=clusters, max_changes=max_changes, scope=scope, partition_mode=mode)
        raise ValueError(f"unknown algorithm {parts[0]!r}; expected sa, cs, pu or mt")


@dataclass(frozen=True)
class ExperimentSpec:
    k_values: tuple[int, ...]
    algorithms: tuple[str, ...]
    master_seed: int
    n: int = DEFAULTS["n"]
    replications: int = DEFAULTS["replications"]
    budget: int = DEFAULTS["budget"]
    scheme: str = DEFAULTS["scheme"]

    def __post_init__(self) -> None:
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise SpecError(f"n: must be a positive integer, got {self.n!r}")
        if not self.k_values:
            raise SpecError("k_values: must not be empty")
        for i, k in enumerate(self.k_values):
            if not 0 <= k <= self.n - 1:
                raise SpecError(f"k_values[{i}]: k={k} violates 0 <= k <= n-1 = {self.n - 1}")
        if self.replications < 1:
            raise SpecError(f"replications: must be >= 1, got {self.replications}")
        if self.budget < 1:
            raise SpecError(f"budget: must be >= 1, got {self.budget}")
        if self.scheme not in SCHEMES:
            raise SpecError(f"scheme: must be one of {SCHEMES}, got {self.scheme!r}")
        if not 0 <= self.master_seed < 2**64:
            raise SpecError(f"master_seed: must be a 64-bit unsigned integer, got {self.master_seed}")
        if not self.algorithms:
            raise SpecError("algorithms: must not be empty")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise SpecError("algorithms: duplicate descriptors")
        for i, d in enumerate(self.algorithms):
            try:
                a = AlgorithmSpec.parse(d)
            except ValueError as exc:
                raise SpecError(f"algorithms[{i}]: {exc}") from None
            if a.kind == "mt" and not 2 <= a.clusters <= self.n // 2:
                raise SpecError(
                    f"algorithms[{i}]: {a.clusters} clusters on n={self.n} would force a cluster "
                    f"with fewer than 2 members (need 2 <= clusters <= {self.n // 2})"
                )

    @property
    def parsed_algorithms(self) -> list[AlgorithmSpec]:
        return [AlgorithmSpec.parse(d) for d in self.algorithms]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["k_values"] = list(self.k_values)
        d["algorithms"] = list(self.algorithms)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentSpec:
        if not isinstance(data, dict):
            raise SpecError("<root>: expected a JSON object")
        allowed = {"n", "k_values", "algorithms", "master_seed", "replications", "budget", "scheme"}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise SpecError(f"{unknown[0]}: unknown key (allowed: {', '.join(sorted(allowed))})")
        for key in ("k_values", "algorithms", "master_seed"):
            if key not in data:
                raise SpecError(f"{key}: required key missing")
        for key in ("k_values", "algorithms"):
            if not isinstance(data[key], list):
                raise SpecError(f"{key}: expected a list")
        for key in ("n", "master_seed", "replications", "budget"):
            if key in data and (not isinstance(data[key], int) or isinstance(data[key], bool)):
                raise SpecError(f"{key}: expected an integer, got {data[key]!r}")
        for i, k in enumerate(data["k_values"]):
            if not isinstance(k, int) or isinstance(k, bool):
                raise SpecError(f"k_values[{i}]: expected an integer, got {k!r}")
        for i, a in enumerate(data["algorithms"]):
            if not isinstance(a, str):
                raise SpecError(f"algorithms[{i}]: expected a descriptor string, got {a!r}")
        merged = {**DEFAULTS, **data}
        return cls(
            n=merged["n"],
            k_values=tuple(merged["k_values"]),
            algorithms=tuple(merged["algorithms"]),
            master_seed=merged["master_seed"],
            replications=merged["replications"],
            budget=merged["budget"],
            scheme=merged["scheme"],
        )


def _label(value) -> int:
    if value is None:
        return 0
    if isinstance(value, (int, np.integer)):
        return int(value)
    return int.from_bytes(hashlib.blake2b(str(value).encode(), digest_size=8).digest(), "little")


def _seed_sequence(master_seed, replication_index, k, algorithm_id, purpose) -> np.random.SeedSequence:
    # landscape and init streams must not depend on the algorithm
    if purpose in ("landscape", "init"):
        algorithm_id = None
    key = (int(replication_index), int(k), _label(purpose), _label(algorithm_id))
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=key)


def derive_seed(master_seed: int, replication_index: int, k: int, algorithm_id: str | None, purpose: str) -> int:
    """64-bit seed for one ``(replication, k, algorithm, purpose)`` tuple."""
    ss = _seed_sequence(master_seed, replication_index, k, algorithm_id, purpose)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def derive_streams(
    master_seed: int, replication_index: int, k: int, algorithm_id: str | None, purpose: str
) -> np.random.Generator:
    """Independent generator for one ``(replication, k, algorithm, purpose)`` tuple."""
    return np.random.Generator(np.random.PCG64(_seed_sequence(master_seed, replication_index, k, algorithm_id, purpose)))


@dataclass
class ReplicationRecord:
    replication: int
    k: int
    algorithm: str
    landscape_seed: int
    best_fitness: float
    hamming: int
    evaluations: int
    steps: int
    termination: str
    normalized_fitness: float | None = None
    fingerprint: str = field(default="", compare=False)


@dataclass(frozen=True)
class AggregateStats:
    k: int
    algorithm: str
    count: int
    fitness_mean: float
    fitness_se: float
    hamming_mean: float
    hamming_se: float
    evaluations_mean: float
    evaluations_se: float
    local_stop_fraction: float
    normalized_fitness_mean: float | None = None
    normalized_fitness_se: float | None = None


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    records: list[ReplicationRecord]
    aggregates: list[AggregateStats]
    oracle: dict = field(default_factory=dict)
    traces: list[tuple] = field(default_factory=list)


def run_algorithm(algo: AlgorithmSpec, landscape: Landscape, init, budget: int, stream_for, trace: bool = False):
    """Run one algorithm; ``stream_for(purpose)`` yields its random streams."""
    if algo.kind == "sa":
        return search.steepest_ascent(landscape, init, budget, trace=trace)
    if algo.kind == "cs":
        return search.centralized_search(landscape, init, budget, stream_for("search"), trace=trace)
    if algo.kind == "pu":
        rngs = [stream_for(f"search/{i}") for i in range(len(algo.tau_grid))]
        return search.parallel_update_sweep(landscape, init, budget, algo.tau_grid, rngs, trace=trace)
    partition = search.build_cluster_partition(
        landscape.n, algo.clusters, algo.partition_mode, stream_for("partition")
    )
    mt = search.MtParams(partition, algo.max_changes, algo.scope)
    return search.muddling_through(landscape, init, budget, mt, stream_for("search"), trace=trace)


def run_replication(spec: ExperimentSpec, replication_index: int, k: int, normalize: bool = False, trace: bool = False):
    """One landscape, one shared start, every algorithm in the spec.

    Returns ``(records, oracle_report_or_None, trace_rows)``.
    """
    seed = derive_seed(spec.master_seed, replication_index, k, None, "landscape")
    landscape = build_landscape(seed, spec.n, k, spec.scheme)
    init = search.random_initial_config(derive_streams(spec.master_seed, replication_index, k, None, "init"), spec.n)
    fp = landscape.fingerprint() + ":" + "".join(map(str, init.tolist()))
    report = None
    if normalize:
        if spec.n > MAX_ORACLE_N:
            raise ValueError(f"normalization needs n <= {MAX_ORACLE_N}, got n={spec.n}")
        report = brute_force_optimum(landscape)
    records, traces = [], []
    for algo in spec.parsed_algorithms:
        def stream_for(purpose, _id=algo.descriptor):
            return derive_streams(spec.master_seed, replication_index, k, _id, purpose)

        try:
            out = run_algorithm(algo, landscape, init, spec.budget, stream_for, trace=trace)
        except Exception as exc:
            raise ReplicationError(f"replication {replication_index}, k={k}, algorithm {algo.descriptor!r}: {exc}") from exc
        records.append(
            ReplicationRecord(
                replication=replication_index,
                k=k,
                algorithm=algo.descriptor,
                landscape_seed=seed,
                best_fitness=out.best_fitness,
                hamming=out.hamming_init_to_best,
                evaluations=out.evaluations,
                steps=out.steps_used,
                termination=out.termination,
                normalized_fitness=None if report is None else out.best_fitness / report.global_max_fitness,
                fingerprint=fp,
            )
        )
        if trace:
            traces.extend((replication_index, k, algo.descriptor, *row) for row in out.trajectory)
    return records, report, traces


def _run_cell(args):
    spec, rep, k, normalize, trace = args
    return rep, k, run_replication(spec, rep, k, normalize, trace)


def _mean_se(values) -> tuple[float, float]:
    vals = [float(v) for v in values]
    m = math.fsum(vals) / len(vals)
    if len(vals) < 2:
        return m, 0.0
    var = math.fsum((v - m) ** 2 for v in vals) / (len(vals) - 1)
    return m, math.sqrt(var / len(vals))


def sort_records(records, algorithms) -> list[ReplicationRecord]:
    order = {a: i for i, a in enumerate(algorithms)}
    return sorted(records, key=lambda r: (r.k, order.get(r.algorithm, len(order)), r.algorithm, r.replication))


def aggregate(records, algorithms=None) -> list[AggregateStats]:
    """Mean and standard error per ``(k, algorithm)``; independent of record order."""
    if algorithms is None:
        algorithms = sorted({r.algorithm for r in records})
    groups: dict[tuple[int, str], list[ReplicationRecord]] = {}
    for r in sort_records(records, algorithms):
        groups.setdefault((r.k, r.algorithm), []).append(r)
    out = []
    for (k, algo), rs in groups.items():
        fm, fse = _mean_se(r.best_fitness for r in rs)
        hm, hse = _mean_se(r.hamming for r in rs)
        em, ese = _mean_se(r.evaluations for r in rs)
        nm = nse = None
        if all(r.normalized_fitness is not None for r in rs):
            nm, nse = _mean_se(r.normalized_fitness for r in rs)
        out.append(
            AggregateStats(
                k=k,
                algorithm=algo,
                count=len(rs),
                fitness_mean=fm,
                fitness_se=fse,
                hamming_mean=hm,
                hamming_se=hse,
                evaluations_mean=em,
                evaluations_se=ese,
                local_stop_fraction=sum(r.termination == search.LOCAL_STOP for r in rs) / len(rs),
                normalized_fitness_mean=nm,
                normalized_fitness_se=nse,
            )
        )
    return out


def paired_difference(records, k: int, a: str, b: str, metric: str = "best_fitness") -> tuple[float, float]:
    """Mean and standard error of ``a - b`` over replications sharing a landscape."""
    va = {r.replication: getattr(r, metric) for r in records if r.k == k and r.algorithm == a}
    vb = {r.replication: getattr(r, metric) for r in records if r.k == k and r.algorithm == b}
    reps = sorted(va.keys() & vb.keys())
    if not reps:
        raise ValueError(f"no paired records for k={k}, {a!r} vs {b!r}")
    return _mean_se(va[i] - vb[i] for i in reps)


def run_experiment(
    spec: ExperimentSpec,
    worker_count: int = 1,
    normalize: bool = False,
    trace: bool = False,
    progress=None,
) -> ExperimentResult:
    """Run every ``(replication, k)`` cell and aggregate.

    Results do not depend on ``worker_count``: records are sorted by
    ``(k, algorithm, replication)`` before any reduction.
    """
    cells = [(spec, rep, k, normalize, trace) for k, rep in product(spec.k_values, range(spec.replications))]
    results = []
    if worker_count <= 1:
        for i, cell in enumerate(cells):
            results.append(_run_cell(cell))
            if progress:
                progress(i + 1, len(cells))
    else:
        with ProcessPoolExecutor(max_workers=worker_count) as pool:
            chunk = max(1, len(cells) // (worker_count * 8))
            for i, res in enumerate(pool.map(_run_cell, cells, chunksize=chunk)):
                results.append(res)
                if progress:
                    progress(i + 1, len(cells))
    records, oracle, traces = [], {}, []
    for rep, k, (recs, report, tr) in sorted(results, key=lambda x: (x[1], x[0])):
        records.extend(recs)
        traces.extend(tr)
        if report is not None:
            oracle[(rep, k)] = report
    records = sort_records(records, spec.algorithms)
    order = {a: i for i, a in enumerate(spec.algorithms)}
    traces.sort(key=lambda t: (t[1], order[t[2]], t[0], t[3]))
    return ExperimentResult(spec, records, aggregate(records, spec.algorithms), oracle, traces)
