"""Exhaustive ground truth for small landscapes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .landscape import Landscape, as_config, flip_node, total_fitness

MAX_ORACLE_N = 24
_CHUNK = 1 << 16


@dataclass(frozen=True)
class OracleReport:
    global_max_fitness: float
    global_max_config: npt.NDArray[np.int8]
    local_optima_count: int
    n_enumerated: int

    def to_dict(self) -> dict:
        return {
            "global_max_fitness": self.global_max_fitness,
            "global_max_config": "".join(map(str, self.global_max_config.tolist())),
            "local_optima_count": self.local_optima_count,
            "n_enumerated": self.n_enumerated,
        }


def index_to_config(index: int, n: int) -> npt.NDArray[np.int8]:
    """Configuration whose bits, node 0 first, spell ``index`` in binary."""
    return ((index >> (n - 1 - np.arange(n))) & 1).astype(np.int8)


def all_fitness(landscape: Landscape) -> npt.NDArray[np.float64]:
    """Fitness of every configuration, in lexicographic order (node 0 most significant)."""
    n, k = landscape.n, landscape.k
    if n > MAX_ORACLE_N:
        raise ValueError(f"exhaustive enumeration refused for n={n} > {MAX_ORACLE_N}")
    shifts = n - 1 - np.arange(n)
    # row weights: focal bit 2^k, then partners big-endian
    cols = np.concatenate([np.arange(n)[:, None], landscape.neighbors], axis=1)
    weights = 1 << np.arange(k, -1, -1)
    fm = landscape.fitness_matrix
    out = np.empty(1 << n, dtype=np.float64)
    for start in range(0, 1 << n, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, 1 << n), dtype=np.int64)
        bits = (idx[:, None] >> shifts) & 1
        rows = bits[:, cols] @ weights
        out[start : start + len(idx)] = fm[rows, np.arange(n)].sum(axis=1) / n
    return out


def brute_force_optimum(landscape: Landscape) -> OracleReport:
    """Enumerate all ``2**n`` configurations.

    The argmax is the lexicographically lowest configuration on exact ties
    and its fitness is recomputed with :func:`total_fitness`. A local
    optimum is a configuration with no strictly better single-bit neighbor.
    """
    n = landscape.n
    fit = all_fitness(landscape)
    idx = np.arange(1 << n, dtype=np.int64)
    is_opt = np.ones(1 << n, dtype=bool)
    for i in range(n):
        is_opt &= fit[idx ^ (1 << (n - 1 - i))] <= fit
    best_idx = int(np.argmax(fit))
    best = index_to_config(best_idx, n)
    return OracleReport(
        global_max_fitness=total_fitness(landscape, best),
        global_max_config=best,
        local_optima_count=int(is_opt.sum()),
        n_enumerated=1 << n,
    )


def is_local_optimum(landscape: Landscape, config) -> bool:
    c = as_config(config, landscape.n)
    f = total_fitness(landscape, c)
    return all(total_fitness(landscape, flip_node(c, i)) <= f for i in range(landscape.n))
