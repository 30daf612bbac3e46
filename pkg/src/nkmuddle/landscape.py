"""NK landscape instances, fitness evaluation and bit-vector helpers."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import numpy.typing as npt

SCHEMES = ("random", "adjacent")


@dataclass(frozen=True, eq=False)
class Landscape:
    """Immutable NK problem instance.

    Attributes
    ----------
    n : int
        Number of decision elements.
    k : int
        Number of interaction partners per element.
    neighbors : ndarray of shape (n, k)
        Interaction partners of each node, ascending.
    fitness_matrix : ndarray of shape (2**(k+1), n)
        Contribution table; row picked by the focal bit and the partner bits,
        column by node.
    seed : int
        Seed the instance was generated from (``-1`` for hand-built tables).
    scheme : str
        ``"random"`` or ``"adjacent"`` interaction structure.
    """

    n: int
    k: int
    neighbors: npt.NDArray[np.int64]
    fitness_matrix: npt.NDArray[np.float64]
    seed: int = -1
    scheme: str = "random"

    def __post_init__(self) -> None:
        _check_nk(self.n, self.k)
        nb = np.array(self.neighbors, dtype=np.int64).reshape(self.n, self.k)
        fm = np.array(self.fitness_matrix, dtype=np.float64)
        if fm.shape != (2 ** (self.k + 1), self.n):
            raise ValueError(
                f"fitness_matrix must have shape {(2 ** (self.k + 1), self.n)}, got {fm.shape}"
            )
        if np.any(fm < 0.0) or np.any(fm >= 1.0):
            raise ValueError("fitness_matrix entries must lie in [0, 1)")
        for i, row in enumerate(nb):
            if len(set(row.tolist())) != self.k or i in row or np.any(np.diff(row) <= 0):
                raise ValueError(f"neighbors[{i}] must be {self.k} distinct ascending indices != {i}")
            if self.k and (row.min() < 0 or row.max() >= self.n):
                raise ValueError(f"neighbors[{i}] out of range")
        nb.setflags(write=False)
        fm.setflags(write=False)
        object.__setattr__(self, "neighbors", nb)
        object.__setattr__(self, "fitness_matrix", fm)
        object.__setattr__(self, "_tables", _Tables(self))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Landscape):
            return NotImplemented
        return (
            self.n == other.n
            and self.k == other.k
            and self.seed == other.seed
            and self.scheme == other.scheme
            and np.array_equal(self.neighbors, other.neighbors)
            and np.array_equal(self.fitness_matrix, other.fitness_matrix)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def dependents(self) -> list[list[int]]:
        """For each node ``i``, the nodes whose contribution changes when ``i`` flips."""
        return [[j for j, _ in pairs] for pairs in self._tables.affected]

    def fingerprint(self) -> str:
        """Short stable digest of the instance, used to check pairing in experiments."""
        h = hashlib.blake2b(digest_size=8)
        h.update(np.asarray([self.n, self.k], dtype=np.int64).tobytes())
        h.update(self.neighbors.tobytes())
        h.update(self.fitness_matrix.tobytes())
        return h.hexdigest()

    def to_dict(self) -> dict:
        return {
            "seed": int(self.seed),
            "n": self.n,
            "k": self.k,
            "scheme": self.scheme,
            "neighbors": self.neighbors.tolist(),
            # row-major; json floats use repr, which round-trips exactly
            "fitness_matrix": self.fitness_matrix.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> Landscape:
        return cls(
            n=int(data["n"]),
            k=int(data["k"]),
            neighbors=np.asarray(data["neighbors"], dtype=np.int64).reshape(int(data["n"]), int(data["k"])),
            fitness_matrix=np.asarray(data["fitness_matrix"], dtype=np.float64),
            seed=int(data.get("seed", -1)),
            scheme=data.get("scheme", "random"),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> Landscape:
        return cls.from_dict(json.loads(Path(path).read_text()))


class _Tables:
    """Plain-Python lookup tables for the search inner loops.

    ``affected[i]`` lists ``(j, w)`` for every node ``j`` whose contribution
    depends on node ``i``; flipping ``i`` maps ``row[j]`` to ``row[j] ^ w``.
    """

    def __init__(self, ls: Landscape) -> None:
        n, k = ls.n, ls.k
        self.columns: list[list[float]] = ls.fitness_matrix.T.tolist()
        self.neighbors: list[list[int]] = ls.neighbors.tolist()
        affected: list[list[tuple[int, int]]] = [[(i, 1 << k)] for i in range(n)]
        for j, nbs in enumerate(self.neighbors):
            for pos, i in enumerate(nbs):
                affected[i].append((j, 1 << (k - 1 - pos)))
        for pairs in affected:
            pairs.sort()
        self.affected = affected

    def rows(self, bits: list[int]) -> list[int]:
        out = []
        for i, nbs in enumerate(self.neighbors):
            r = bits[i]
            for b in nbs:
                r = (r << 1) | bits[b]
            out.append(r)
        return out


def _check_nk(n: int, k: int) -> None:
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if k < 0 or k > n - 1:
        raise ValueError(f"k must satisfy 0 <= k <= n-1 = {n - 1}, got {k}")


def build_landscape(seed: int, n: int, k: int, scheme: str = "random") -> Landscape:
    """Generate an NK landscape deterministically from ``seed``.

    Neighbors are drawn first (``random``: ``k`` distinct partners per node,
    uniformly without replacement; ``adjacent``: ``ceil(k/2)`` successors and
    ``floor(k/2)`` predecessors on a ring). The fitness matrix is then filled
    column by column, rows ascending, from the same generator.
    """
    _check_nk(n, k)
    if scheme not in SCHEMES:
        raise ValueError(f"unknown interaction scheme {scheme!r}; expected one of {SCHEMES}")
    rng = np.random.default_rng(seed)
    neighbors = np.empty((n, k), dtype=np.int64)
    for i in range(n):
        if scheme == "random":
            others = np.delete(np.arange(n), i)
            picked = rng.choice(others, size=k, replace=False)
        else:
            succ = [(i + d) % n for d in range(1, (k + 1) // 2 + 1)]
            pred = [(i - d) % n for d in range(1, k // 2 + 1)]
            picked = np.asarray(succ + pred, dtype=np.int64)
        neighbors[i] = np.sort(picked)
    rows = 2 ** (k + 1)
    fitness_matrix = rng.random(n * rows).reshape(n, rows).T
    return Landscape(n=n, k=k, neighbors=neighbors, fitness_matrix=fitness_matrix, seed=int(seed), scheme=scheme)


def as_config(bits, n: int | None = None) -> npt.NDArray[np.int8]:
    """Validate and convert a bit sequence into a configuration array."""
    c = np.asarray(bits, dtype=np.int8).ravel()
    if n is not None and c.shape[0] != n:
        raise ValueError(f"configuration length {c.shape[0]} does not match n={n}")
    if np.any((c != 0) & (c != 1)):
        raise ValueError("configuration entries must be 0 or 1")
    return c


def _check_node(landscape_or_n, node: int) -> None:
    n = landscape_or_n if isinstance(landscape_or_n, int) else landscape_or_n.n
    if not 0 <= node < n:
        raise IndexError(f"node {node} out of range for n={n}")


def contribution_row_index(landscape: Landscape, config, node: int) -> int:
    """Row of the fitness matrix used by ``node``.

    The focal bit is the most significant bit, followed by the partner bits in
    ascending partner order.
    """
    _check_node(landscape, node)
    c = as_config(config, landscape.n)
    r = int(c[node])
    for j in landscape.neighbors[node]:
        r = (r << 1) | int(c[j])
    return r


def node_contribution(landscape: Landscape, config, node: int) -> float:
    return float(landscape.fitness_matrix[contribution_row_index(landscape, config, node), node])


def contribution_profile(landscape: Landscape, config) -> npt.NDArray[np.float64]:
    """Per-node contributions of ``config`` as a length-``n`` array."""
    c = as_config(config, landscape.n)
    t = landscape._tables
    rows = t.rows(c.tolist())
    return np.fromiter((t.columns[i][r] for i, r in enumerate(rows)), dtype=np.float64, count=landscape.n)


def total_fitness(landscape: Landscape, config) -> float:
    """Mean contribution over all nodes.

    Summation is correctly rounded (``math.fsum``) so the value does not
    depend on summation order; the search code relies on this to report
    bit-identical fitness.
    """
    return math.fsum(contribution_profile(landscape, config).tolist()) / landscape.n


def flip_node(config, node: int) -> npt.NDArray[np.int8]:
    c = as_config(config)
    _check_node(c.shape[0], node)
    out = c.copy()
    out[node] ^= 1
    return out


def hamming_distance(a, b) -> int:
    a, b = as_config(a), as_config(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    return int(np.count_nonzero(a != b))


def delta_fitness(landscape: Landscape, config, profile, node: int):
    """Fitness after flipping ``node``, recomputing only affected contributions.

    Returns
    -------
    fitness : float
        Total fitness of the flipped configuration.
    profile : ndarray
        Updated contribution profile (a new array; inputs are not modified).
    """
    _check_node(landscape, node)
    c = as_config(config, landscape.n)
    new_profile = np.array(profile, dtype=np.float64)
    if __debug__:
        assert np.array_equal(new_profile, contribution_profile(landscape, c)), "stale contribution profile"
    t = landscape._tables
    bits = c.tolist()
    for j, w in t.affected[node]:
        r = bits[j]
        for b in t.neighbors[j]:
            r = (r << 1) | bits[b]
        new_profile[j] = t.columns[j][r ^ w]
    return math.fsum(new_profile.tolist()) / landscape.n, new_profile
