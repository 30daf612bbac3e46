"""Local search procedures on NK landscapes.

Four procedures share one accounting contract:

* :func:`steepest_ascent` (SA): one step is a full sweep of the ``n``
  single-bit neighbors, ``n`` evaluations per step.
* :func:`centralized_search` (CS): one step is one randomly proposed flip,
  one evaluation per step.
* :func:`parallel_update` (PU): one step is one generation.
* :func:`muddling_through` (MT): one step is one proposed move, accepted on
  the strength of the moved cluster's co-member contributions alone.

All acceptance tests use strict ``>``. Every function returns a
:class:`SearchOutcome` whose ``best_fitness`` equals
``total_fitness(landscape, best_config)`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import numpy.typing as npt

from .landscape import Landscape, as_config, contribution_profile, hamming_distance, total_fitness

BUDGET_EXHAUSTED = "budget_exhausted"
LOCAL_STOP = "local_stop"

EXCLUDE_FOCAL = "comembers_excluding_focal"
WHOLE_CLUSTER = "whole_cluster"
SCOPES = (EXCLUDE_FOCAL, WHOLE_CLUSTER)

DEFAULT_TAU_GRID = tuple(i / 10 for i in range(1, 10))


@dataclass(frozen=True)
class SearchBudget:
    max_steps: int = 1000

    def __post_init__(self) -> None:
        if int(self.max_steps) < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")


def _max_steps(budget: SearchBudget | int) -> int:
    if isinstance(budget, SearchBudget):
        return int(budget.max_steps)
    return int(SearchBudget(int(budget)).max_steps)


@dataclass(frozen=True)
class ClusterPartition:
    """Assignment of node indices to ``cluster_count`` clusters."""

    assignment: tuple[int, ...]
    cluster_count: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))
        if self.cluster_count < 2:
            raise ValueError(f"cluster_count must be >= 2, got {self.cluster_count}")
        seen = set(self.assignment)
        if seen != set(range(self.cluster_count)):
            raise ValueError("every cluster id in [0, cluster_count) must be used, and no other")

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def members(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.cluster_count)]
        for node, c in enumerate(self.assignment):
            out[c].append(node)
        return out

    @property
    def sizes(self) -> list[int]:
        return [len(m) for m in self.members]


def build_cluster_partition(
    n: int,
    cluster_count: int,
    mode: str = "contiguous",
    rng: np.random.Generator | None = None,
) -> ClusterPartition:
    """Split ``n`` nodes into clusters whose sizes differ by at most one.

    Larger clusters come first. ``mode="seeded_random"`` shuffles the same
    size profile over the nodes using ``rng``.
    """
    if not 2 <= cluster_count <= n // 2:
        raise ValueError(
            f"cluster_count must satisfy 2 <= cluster_count <= n//2 = {n // 2} "
            f"so every cluster has at least 2 members, got {cluster_count}"
        )
    base, extra = divmod(n, cluster_count)
    assignment = []
    for c in range(cluster_count):
        assignment.extend([c] * (base + (1 if c < extra else 0)))
    if mode == "seeded_random":
        if rng is None:
            raise ValueError("seeded_random partitions need an rng")
        assignment = rng.permutation(np.asarray(assignment)).tolist()
    elif mode != "contiguous":
        raise ValueError(f"unknown partition mode {mode!r}")
    return ClusterPartition(tuple(assignment), cluster_count)


@dataclass(frozen=True)
class MtParams:
    partition: ClusterPartition
    max_changes_per_move: int = 1
    acceptance_scope: str = EXCLUDE_FOCAL

    def __post_init__(self) -> None:
        if self.max_changes_per_move not in (1, 2):
            raise ValueError(f"max_changes_per_move must be 1 or 2, got {self.max_changes_per_move}")
        if self.acceptance_scope not in SCOPES:
            raise ValueError(f"acceptance_scope must be one of {SCOPES}")
        if self.acceptance_scope == EXCLUDE_FOCAL and min(self.partition.sizes) < 2:
            raise ValueError("co-member acceptance needs every cluster to have >= 2 members")


@dataclass(frozen=True)
class PuParams:
    tau: float

    def __post_init__(self) -> None:
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau}")


@dataclass
class SearchOutcome:
    """Result of one search run.

    ``trajectory`` is only filled when tracing is requested; rows are
    ``(step, proposal, accepted, current_fitness, best_fitness)``.
    """

    init_config: npt.NDArray[np.int8]
    best_config: npt.NDArray[np.int8]
    best_fitness: float
    final_config: npt.NDArray[np.int8]
    steps_used: int
    evaluations: int
    moves: int
    termination: str
    trajectory: list[tuple] | None = None
    info: dict = field(default_factory=dict)

    @property
    def hamming_init_to_best(self) -> int:
        return hamming_distance(self.init_config, self.best_config)


class _Uniforms:
    """Block-buffered uniform draws from a numpy Generator."""

    def __init__(self, rng, block: int = 256) -> None:
        self._rng = rng
        self._block = block
        self._buf: list[float] = []
        self._pos = 0

    def next(self) -> float:
        if self._pos >= len(self._buf):
            self._buf = self._rng.random(self._block).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def index(self, m: int) -> int:
        return min(int(self.next() * m), m - 1)


class _State:
    """Mutable walker state: bits, matrix rows and contributions per node."""

    def __init__(self, landscape: Landscape, config) -> None:
        t = landscape._tables
        self.n = landscape.n
        self.cols = t.columns
        self.affected = t.affected
        self.bits = as_config(config, landscape.n).tolist()
        self.rows = t.rows(self.bits)
        self.contrib = [self.cols[j][r] for j, r in enumerate(self.rows)]

    def gain(self, node: int) -> float:
        cols, rows, contrib = self.cols, self.rows, self.contrib
        g = 0.0
        for j, w in self.affected[node]:
            g += cols[j][rows[j] ^ w] - contrib[j]
        return g

    def flip(self, node: int) -> None:
        cols, rows, contrib = self.cols, self.rows, self.contrib
        for j, w in self.affected[node]:
            r = rows[j] ^ w
            rows[j] = r
            contrib[j] = cols[j][r]
        self.bits[node] ^= 1

    def fitness(self) -> float:
        return math.fsum(self.contrib) / self.n

    def config(self) -> npt.NDArray[np.int8]:
        return np.asarray(self.bits, dtype=np.int8)


def _outcome(landscape, init, best, final, steps, evals, moves, termination, trajectory, **info):
    best_fitness = total_fitness(landscape, best)
    return SearchOutcome(
        init_config=as_config(init).copy(),
        best_config=best,
        best_fitness=best_fitness,
        final_config=final,
        steps_used=steps,
        evaluations=evals,
        moves=moves,
        termination=termination,
        trajectory=trajectory,
        info=info,
    )


def random_initial_config(rng: np.random.Generator, n: int) -> npt.NDArray[np.int8]:
    """Each bit independently 0 or 1 with probability one half."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return rng.integers(0, 2, size=n, dtype=np.int8)


def steepest_ascent(landscape: Landscape, init, budget: SearchBudget | int = 1000, trace: bool = False) -> SearchOutcome:
    """Move to the best strictly improving single-bit neighbor until none exists.

    Ties between equally good neighbors go to the lowest node index.
    """
    max_steps = _max_steps(budget)
    st = _State(landscape, init)
    n = st.n
    steps = evals = moves = 0
    termination = BUDGET_EXHAUSTED
    trajectory = [] if trace else None
    while steps < max_steps:
        steps += 1
        evals += n
        best_node, best_gain = -1, 0.0
        for i in range(n):
            g = st.gain(i)
            if g > best_gain:
                best_node, best_gain = i, g
        if best_node < 0:
            termination = LOCAL_STOP
            if trace:
                f = st.fitness()
                trajectory.append((steps, "", False, f, f))
            break
        st.flip(best_node)
        moves += 1
        if trace:
            f = st.fitness()
            trajectory.append((steps, str(best_node), True, f, f))
    final = st.config()
    return _outcome(landscape, init, final, final.copy(), steps, evals, moves, termination, trajectory)


def centralized_search(
    landscape: Landscape,
    init,
    budget: SearchBudget | int,
    rng: np.random.Generator,
    trace: bool = False,
) -> SearchOutcome:
    """Accept a uniformly chosen single flip iff it strictly improves fitness.

    Proposals are drawn without replacement from the flips not yet tried at
    the current configuration; the run stops locally once all ``n`` have
    been rejected.
    """
    max_steps = _max_steps(budget)
    st = _State(landscape, init)
    n = st.n
    draws = _Uniforms(rng)
    untried = list(range(n))
    steps = evals = moves = 0
    termination = BUDGET_EXHAUSTED
    trajectory = [] if trace else None
    f = st.fitness() if trace else 0.0
    while steps < max_steps:
        idx = draws.index(len(untried))
        node = untried[idx]
        untried[idx] = untried[-1]
        untried.pop()
        steps += 1
        evals += 1
        accepted = st.gain(node) > 0.0
        if accepted:
            st.flip(node)
            moves += 1
            untried = list(range(n))
        if trace:
            f = st.fitness()
            trajectory.append((steps, str(node), accepted, f, f))
        if not untried:
            termination = LOCAL_STOP
            break
    final = st.config()
    return _outcome(landscape, init, final, final.copy(), steps, evals, moves, termination, trajectory)


def parallel_update(
    landscape: Landscape,
    init,
    budget: SearchBudget | int,
    pu: PuParams | float,
    rng: np.random.Generator,
    trace: bool = False,
) -> SearchOutcome:
    """Synchronous updating with per-node attempt probability ``tau``.

    Each generation every node attempts a flip with probability ``tau``; the
    attempting nodes whose solo flip would strictly raise total fitness then
    flip together. The joint move may lower fitness, so the best
    configuration on the path is reported.

    Evaluations per generation: one per attempting node, plus one for the
    new configuration when something flipped, or ``n`` for the full
    local-optimum scan when nothing did.
    """
    if not isinstance(pu, PuParams):
        pu = PuParams(float(pu))
    tau = pu.tau
    max_steps = _max_steps(budget)
    st = _State(landscape, init)
    n = st.n
    best_fitness = st.fitness()
    best = st.config()
    steps = evals = moves = 0
    termination = BUDGET_EXHAUSTED
    trajectory = [] if trace else None
    while steps < max_steps:
        steps += 1
        attempts = [i for i, u in enumerate(rng.random(n).tolist()) if u < tau]
        evals += len(attempts)
        flips = [i for i in attempts if st.gain(i) > 0.0]
        if flips:
            for i in flips:
                st.flip(i)
            moves += 1
            evals += 1
            f = st.fitness()
            if f > best_fitness:
                best_fitness, best = f, st.config()
            if trace:
                trajectory.append((steps, "+".join(map(str, flips)), True, f, best_fitness))
            continue
        evals += n
        stuck = not any(st.gain(i) > 0.0 for i in range(n))
        if trace:
            trajectory.append((steps, "", False, st.fitness(), best_fitness))
        if stuck:
            termination = LOCAL_STOP
            break
    return _outcome(landscape, init, best, st.config(), steps, evals, moves, termination, trajectory, tau=tau)


def parallel_update_sweep(
    landscape: Landscape,
    init,
    budget: SearchBudget | int,
    tau_grid=DEFAULT_TAU_GRID,
    rngs=None,
    trace: bool = False,
) -> SearchOutcome:
    """Run :func:`parallel_update` once per ``tau`` and keep the fittest run.

    Each ``tau`` gets its own stream and its own full budget. Evaluations are
    summed over all runs; the other fields come from the winning run (first
    one on exact ties).
    """
    grid = [float(t) for t in tau_grid]
    if not grid:
        raise ValueError("tau grid must not be empty")
    if rngs is None or len(rngs) != len(grid):
        raise ValueError("need exactly one rng stream per tau value")
    runs = [parallel_update(landscape, init, budget, PuParams(t), r, trace=trace) for t, r in zip(grid, rngs)]
    winner = max(range(len(runs)), key=lambda i: (runs[i].best_fitness, -i))
    out = runs[winner]
    out.evaluations = sum(r.evaluations for r in runs)
    out.info = {"tau": grid[winner], "tau_grid": grid, "per_tau_best": [r.best_fitness for r in runs]}
    return out


def _check_focal(partition: ClusterPartition, focal_nodes) -> tuple[set[int], int]:
    focal = {int(i) for i in focal_nodes}
    if not focal:
        raise ValueError("focal node set must not be empty")
    clusters = {partition.assignment[i] for i in focal}
    if len(clusters) != 1:
        raise ValueError(f"focal nodes {sorted(focal)} span clusters {sorted(clusters)}")
    return focal, clusters.pop()


def cluster_comember_aggregate(
    landscape: Landscape,
    config,
    partition: ClusterPartition,
    focal_nodes,
    scope: str = EXCLUDE_FOCAL,
) -> float:
    """Summed contributions of the focal cluster, optionally without the focal nodes."""
    if partition.n != landscape.n:
        raise ValueError(f"partition covers {partition.n} nodes, landscape has {landscape.n}")
    if scope not in SCOPES:
        raise ValueError(f"scope must be one of {SCOPES}")
    focal, c = _check_focal(partition, focal_nodes)
    prof = contribution_profile(landscape, config)
    members = [j for j in partition.members[c] if scope == WHOLE_CLUSTER or j not in focal]
    return math.fsum(prof[members].tolist())


def mt_candidates(partition: ClusterPartition, max_changes: int) -> list[tuple[int, ...]]:
    """All single flips, then (for ``max_changes=2``) every same-cluster pair."""
    cands: list[tuple[int, ...]] = [(i,) for i in range(partition.n)]
    if max_changes == 2:
        for members in partition.members:
            cands.extend(combinations(members, 2))
    return cands


def _mt_checks(landscape: Landscape, partition: ClusterPartition, cands, scope: str):
    affected = landscape._tables.affected
    checks = []
    for cand in cands:
        c = partition.assignment[cand[0]]
        masks: dict[int, int] = {}
        for i in cand:
            for j, w in affected[i]:
                masks[j] = masks.get(j, 0) ^ w
        checks.append(
            [
                (j, w)
                for j, w in sorted(masks.items())
                if partition.assignment[j] == c and (scope == WHOLE_CLUSTER or j not in cand)
            ]
        )
    return checks


def muddling_through(
    landscape: Landscape,
    init,
    budget: SearchBudget | int,
    mt: MtParams,
    rng: np.random.Generator,
    trace: bool = False,
) -> SearchOutcome:
    """Cluster-myopic walk that keeps the fittest configuration it passes.

    Each step draws one untried candidate move uniformly (a single flip, or
    with ``max_changes_per_move=2`` also a pair of flips inside one cluster)
    and accepts it iff the summed contributions of the moved cluster's
    members (excluding the moved nodes under the default scope) strictly
    increase. Total fitness plays no part in acceptance and may fall. The
    run stops locally when every candidate at the current configuration has
    been rejected.
    """
    if mt.partition.n != landscape.n:
        raise ValueError(f"partition covers {mt.partition.n} nodes, landscape has {landscape.n}")
    max_steps = _max_steps(budget)
    cands = mt_candidates(mt.partition, mt.max_changes_per_move)
    checks = _mt_checks(landscape, mt.partition, cands, mt.acceptance_scope)
    m = len(cands)
    st = _State(landscape, init)
    cols, rows, contrib = st.cols, st.rows, st.contrib
    draws = _Uniforms(rng)
    best_fitness = st.fitness()
    best = st.config()
    f = best_fitness
    untried = list(range(m))
    steps = evals = moves = 0
    termination = BUDGET_EXHAUSTED
    trajectory = [] if trace else None
    while steps < max_steps:
        idx = draws.index(len(untried))
        ci = untried[idx]
        untried[idx] = untried[-1]
        untried.pop()
        steps += 1
        evals += 1
        old = new = 0.0
        for j, w in checks[ci]:
            old += contrib[j]
            new += cols[j][rows[j] ^ w]
        accepted = new > old
        if accepted:
            for i in cands[ci]:
                st.flip(i)
            moves += 1
            untried = list(range(m))
            f = st.fitness()
            if f > best_fitness:
                best_fitness, best = f, st.config()
        if trace:
            trajectory.append((steps, "+".join(map(str, cands[ci])), accepted, f, best_fitness))
        if not untried:
            termination = LOCAL_STOP
            break
    return _outcome(landscape, init, best, st.config(), steps, evals, moves, termination, trajectory)
