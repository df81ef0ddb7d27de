"""Random graphs, exact property oracles and balanced dataset construction.

Graphs are simple and undirected, stored as an integer bitset over the
n(n-1)/2 unordered pairs in row-major (i < j) order.  All property oracles
are exact: connectivity and bipartiteness by breadth-first search,
Hamiltonian cycle and path by bitmask dynamic programming.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np

__all__ = [
    "Graph",
    "GraphSample",
    "Dataset",
    "GenerationError",
    "PROPERTIES",
    "property_oracle",
    "pair_list",
    "edge_index",
    "erdos_renyi",
    "is_connected",
    "is_bipartite",
    "has_hamiltonian_cycle",
    "has_hamiltonian_path",
    "generate_balanced_dataset",
    "count_labeled_graphs",
    "count_unlabeled_graphs",
    "canonical_form",
    "connectedness_curve",
]

MAX_NODES = 16


class GenerationError(RuntimeError):
    """Raised when balanced sampling cannot fill a class within its budget."""


@lru_cache(maxsize=None)
def pair_list(n: int) -> tuple[tuple[int, int], ...]:
    """Unordered pairs (i, j), i < j, in row-major order."""
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


@lru_cache(maxsize=None)
def _pair_index(n: int) -> dict[tuple[int, int], int]:
    return {pair: k for k, pair in enumerate(pair_list(n))}


def edge_index(n: int, i: int, j: int) -> int:
    """Bit position of the (i, j) edge in the bitset."""
    if i > j:
        i, j = j, i
    return _pair_index(n)[(i, j)]


def _iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on ``n`` labeled nodes as an edge bitset."""

    n: int
    bits: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_NODES:
            raise ValueError(f"node count {self.n} outside [1, {MAX_NODES}]")
        m = self.n * (self.n - 1) // 2
        if not 0 <= self.bits < (1 << m):
            raise ValueError("edge bitset out of range for node count")

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, 0)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, (1 << (n * (n - 1) // 2)) - 1)

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[tuple[int, int]]) -> "Graph":
        bits = 0
        for i, j in edges:
            if i == j:
                raise ValueError("self-loops are not allowed")
            bits |= 1 << edge_index(n, i, j)
        return cls(n, bits)

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise ValueError("a cycle needs at least 3 nodes")
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def star(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(0, j) for j in range(1, n)])

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.bits >> edge_index(self.n, i, j) & 1)

    def edges(self) -> tuple[tuple[int, int], ...]:
        pairs = pair_list(self.n)
        return tuple(pairs[k] for k in _iter_bits(self.bits))

    @property
    def edge_count(self) -> int:
        return self.bits.bit_count()

    def neighbor_masks(self) -> list[int]:
        """Adjacency as one bitmask of neighbors per node."""
        adj = [0] * self.n
        for i, j in self.edges():
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return adj

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with node i renamed to perm[i]."""
        return Graph.from_edges(
            self.n, [(perm[i], perm[j]) for i, j in self.edges()]
        )


def erdos_renyi(n: int, p: float, rng: np.random.Generator) -> Graph:
    """G(n, p): each of the n(n-1)/2 edges present independently with prob p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability {p} outside [0, 1]")
    m = n * (n - 1) // 2
    draws = rng.random(m)
    bits = 0
    for k in range(m):
        if draws[k] < p:
            bits |= 1 << k
    return Graph(n, bits)


def is_connected(g: Graph) -> bool:
    """BFS from node 0 reaches every node; a single node is connected."""
    if g.n <= 1:
        return True
    adj = g.neighbor_masks()
    seen = 1
    frontier = 1
    while frontier:
        reached = 0
        for v in _iter_bits(frontier):
            reached |= adj[v]
        frontier = reached & ~seen
        seen |= frontier
    return seen == (1 << g.n) - 1


def is_bipartite(g: Graph) -> bool:
    """True iff every connected component admits a proper 2-coloring."""
    adj = g.neighbor_masks()
    color = [-1] * g.n
    for start in range(g.n):
        if color[start] != -1:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            v = stack.pop()
            for u in _iter_bits(adj[v]):
                if color[u] == -1:
                    color[u] = color[v] ^ 1
                    stack.append(u)
                elif color[u] == color[v]:
                    return False
    return True


def has_hamiltonian_cycle(g: Graph) -> bool:
    """Bitmask DP anchored at node 0; a cycle needs n >= 3.

    dp[mask] holds the end nodes v of simple paths that start at node 0 and
    visit exactly ``mask``; the cycle closes if a full-mask end neighbors 0.
    """
    n = g.n
    if n < 3:
        return False
    adj = g.neighbor_masks()
    # necessary conditions, cheap rejects before the DP
    if any(a.bit_count() < 2 for a in adj) or not is_connected(g):
        return False
    size = 1 << n
    dp = [0] * size
    dp[1] = 1
    for mask in range(1, size):
        if not mask & 1:
            continue
        ends = dp[mask]
        if not ends:
            continue
        for v in _iter_bits(ends):
            for u in _iter_bits(adj[v] & ~mask):
                dp[mask | (1 << u)] |= 1 << u
    return bool(dp[size - 1] & adj[0])


def has_hamiltonian_path(g: Graph) -> bool:
    """Bitmask DP over all start nodes; a single node counts as a path."""
    n = g.n
    if n == 1:
        return True
    if not is_connected(g):
        return False
    adj = g.neighbor_masks()
    size = 1 << n
    dp = [0] * size
    for v in range(n):
        dp[1 << v] = 1 << v
    for mask in range(1, size):
        ends = dp[mask]
        if not ends:
            continue
        if mask == size - 1:
            return True
        for v in _iter_bits(ends):
            for u in _iter_bits(adj[v] & ~mask):
                dp[mask | (1 << u)] |= 1 << u
    return dp[size - 1] != 0


PROPERTIES = ("connected", "bipartite", "hamiltonian_cycle", "hamiltonian_path")

_ORACLES: dict[str, Callable[[Graph], bool]] = {
    "connected": is_connected,
    "bipartite": is_bipartite,
    "hamiltonian_cycle": has_hamiltonian_cycle,
    "hamiltonian_path": has_hamiltonian_path,
}


def property_oracle(name: str) -> Callable[[Graph], bool]:
    try:
        return _ORACLES[name]
    except KeyError:
        raise ValueError(f"unknown property {name!r}; expected one of {PROPERTIES}")


@dataclass(frozen=True)
class GraphSample:
    """A graph with its binary label (+1 present, -1 absent) for one property."""

    graph: Graph
    label: int
    property: str

    def __post_init__(self) -> None:
        if self.label not in (1, -1):
            raise ValueError("label must be +1 or -1")
        if self.property not in PROPERTIES:
            raise ValueError(f"unknown property {self.property!r}")


@dataclass(frozen=True)
class Dataset:
    """Ordered samples; the first ``train_per_epoch`` form the training pool."""

    samples: tuple[GraphSample, ...]
    train_per_epoch: int = 100

    @property
    def n(self) -> int:
        return self.samples[0].graph.n

    @property
    def property(self) -> str:
        return self.samples[0].property

    @property
    def validation_count(self) -> int:
        return len(self.samples) - self.train_per_epoch

    def class_counts(self) -> tuple[int, int]:
        pos = sum(1 for s in self.samples if s.label == 1)
        return pos, len(self.samples) - pos


def generate_balanced_dataset(
    property_name: str,
    n: int,
    total: int,
    rng: np.random.Generator,
    train_per_epoch: int = 100,
    max_attempts: int | None = None,
) -> Dataset:
    """Rejection-sample a balanced dataset of ``total`` labeled graphs.

    Each draw picks an edge probability uniformly in [0, 1], samples a
    G(n, p) graph, labels it with the exact oracle and keeps it if its class
    is not yet full.  The final order is shuffled.  Raises GenerationError
    if one class stays unreachable within the attempt budget.
    """
    if total <= 0 or total % 2:
        raise ValueError("total must be positive and even")
    oracle = property_oracle(property_name)
    target = total // 2
    budget = max_attempts if max_attempts is not None else 2000 * total
    positives: list[Graph] = []
    negatives: list[Graph] = []
    attempts = 0
    while len(positives) < target or len(negatives) < target:
        if attempts >= budget:
            raise GenerationError(
                f"balanced sampling stalled for {property_name!r} at n={n}: "
                f"{len(positives)} positive / {len(negatives)} negative "
                f"after {attempts} attempts"
            )
        attempts += 1
        p = rng.random()
        g = erdos_renyi(n, p, rng)
        if oracle(g):
            if len(positives) < target:
                positives.append(g)
        elif len(negatives) < target:
            negatives.append(g)
    samples = [GraphSample(g, 1, property_name) for g in positives]
    samples += [GraphSample(g, -1, property_name) for g in negatives]
    order = rng.permutation(total)
    shuffled = tuple(samples[k] for k in order)
    return Dataset(shuffled, train_per_epoch)


def count_labeled_graphs(n: int) -> int:
    return 1 << (n * (n - 1) // 2)


_MAX_ENUM_NODES = 7


def canonical_form(g: Graph) -> int:
    """Minimum edge bitset over all node relabelings (n <= 7 only)."""
    if g.n > _MAX_ENUM_NODES:
        raise ValueError(f"canonical form supported up to {_MAX_ENUM_NODES} nodes")
    return min(g.relabel(perm).bits for perm in itertools.permutations(range(g.n)))


def count_unlabeled_graphs(n: int) -> int:
    """Number of isomorphism classes of simple graphs on n nodes (n <= 7).

    Enumerates all labeled graphs and counts distinct canonical forms.  The
    per-permutation edge relabeling is a fixed column gather, so each graph
    chunk reduces to dense matrix products over {0, 1} edge indicators.
    """
    if not 1 <= n <= _MAX_ENUM_NODES:
        raise ValueError(
            f"unlabeled count supported for 1 <= n <= {_MAX_ENUM_NODES}, got {n}"
        )
    m = n * (n - 1) // 2
    pairs = pair_list(n)
    index = _pair_index(n)
    weights = []
    for perm in itertools.permutations(range(n)):
        w = np.zeros(m, dtype=np.float64)
        for k, (i, j) in enumerate(pairs):
            a, b = perm[i], perm[j]
            w[k] = float(1 << index[(min(a, b), max(a, b))])
        weights.append(w)
    weight_mat = np.array(weights).T  # (m, n!)
    total = 1 << m
    chunk = 1 << 13
    perm_block = 720
    canon = np.empty(total, dtype=np.int64)
    shifts = np.arange(m, dtype=np.int64)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = ((codes[:, None] >> shifts) & 1).astype(np.float64)
        best = None
        for c0 in range(0, weight_mat.shape[1], perm_block):
            mapped = bits @ weight_mat[:, c0 : c0 + perm_block]
            block_min = mapped.min(axis=1)
            best = block_min if best is None else np.minimum(best, block_min)
        canon[start : start + len(codes)] = best.astype(np.int64)
    return int(np.unique(canon).size)


def connectedness_curve(
    n: int,
    p_grid: Sequence[float],
    samples_per_point: int,
    rng: np.random.Generator,
) -> list[tuple[float, float]]:
    """Monte-Carlo estimate of P(connected) for G(n, p) on each grid point."""
    if any(not 0.0 <= p <= 1.0 for p in p_grid):
        raise ValueError("grid probabilities must lie in [0, 1]")
    points = []
    for p in p_grid:
        hits = sum(
            1
            for _ in range(samples_per_point)
            if is_connected(erdos_renyi(n, p, rng))
        )
        points.append((float(p), hits / samples_per_point))
    return points
