"""Sparse random graphs with finite mean degree.

Three degree models are supported:

* ``PoissonFixedM(alpha)``: exactly round(alpha*n) distinct edges drawn
  uniformly among all node pairs; mean degree z = 2*alpha.
* ``GNP(z)``: every pair kept independently with probability z/(n-1).
* ``Regular(z)``: uniform simple z-regular graph via the configuration
  model with whole-graph restarts.

Graphs are undirected and simple. Edges are stored canonically as (i, j)
with i < j, sorted; adjacency is kept in CSR form for message passing.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GenerationError
from .rng import as_generator

__all__ = [
    "Graph",
    "PoissonFixedM",
    "GNP",
    "Regular",
    "generate",
    "local_tree_check",
    "tree_fraction",
    "giant_component_fraction",
    "write_edge_list",
    "read_edge_list",
]


class Graph:
    """Immutable undirected simple graph.

    Parameters
    ----------
    n_nodes : int
        Number of nodes, labeled 0..n_nodes-1.
    edges : array-like of shape (M, 2)
        Edge endpoints. Canonicalized to i < j and sorted; self loops and
        duplicates are rejected.
    """

    def __init__(self, n_nodes: int, edges):
        if n_nodes < 1:
            raise ValueError("n_nodes must be >= 1")
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= n_nodes:
                raise ValueError("edge endpoint out of range")
            if (edges[:, 0] == edges[:, 1]).any():
                raise ValueError("self loop")
            lo = edges.min(axis=1)
            hi = edges.max(axis=1)
            edges = np.stack([lo, hi], axis=1)
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            edges = edges[order]
            if edges.shape[0] > 1:
                dup = (np.diff(edges[:, 0]) == 0) & (np.diff(edges[:, 1]) == 0)
                if dup.any():
                    raise ValueError("duplicate edge")
        self.n_nodes = int(n_nodes)
        self.edges = edges
        self.edges.flags.writeable = False
        self._build_csr()
        self._slot_lookup = None

    def _build_csr(self):
        n, m = self.n_nodes, self.edges.shape[0]
        deg = np.zeros(n, dtype=np.int64)
        if m:
            np.add.at(deg, self.edges[:, 0], 1)
            np.add.at(deg, self.edges[:, 1], 1)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        indices = np.empty(2 * m, dtype=np.int64)
        slot_row = np.empty(2 * m, dtype=np.int64)
        cursor = indptr[:-1].copy()
        for a, b in self.edges:
            indices[cursor[a]] = b
            slot_row[cursor[a]] = a
            cursor[a] += 1
            indices[cursor[b]] = a
            slot_row[cursor[b]] = b
            cursor[b] += 1
        # reciprocal slot: position of the reversed copy of each (row, nbr) pair
        recip = np.empty(2 * m, dtype=np.int64)
        pos = {}
        for p in range(2 * m):
            pos[(slot_row[p], indices[p])] = p
        for p in range(2 * m):
            recip[p] = pos[(indices[p], slot_row[p])]
        for arr in (indptr, indices, slot_row, recip):
            arr.flags.writeable = False
        self.indptr = indptr
        self.indices = indices
        self.slot_row = slot_row
        self.slot_recip = recip

    @property
    def n_edges(self) -> int:
        return self.edges.shape[0]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def slot_of(self, src: int, dst: int) -> int:
        """CSR slot holding the directed message src -> dst."""
        if self._slot_lookup is None:
            self._slot_lookup = {
                (int(self.indices[p]), int(self.slot_row[p])): p
                for p in range(self.indices.size)
            }
        return self._slot_lookup[(src, dst)]

    def __repr__(self):
        return f"Graph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"


@dataclass(frozen=True)
class PoissonFixedM:
    """Exactly round(alpha*n) uniform distinct edges; z = 2*alpha."""
    alpha: float

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")


@dataclass(frozen=True)
class GNP:
    """Independent pairs, keep probability z/(n-1)."""
    z: float

    def __post_init__(self):
        if self.z < 0:
            raise ValueError("z must be >= 0")


@dataclass(frozen=True)
class Regular:
    """Uniform simple z-regular graph (configuration model, restarts)."""
    z: int

    def __post_init__(self):
        if self.z < 0:
            raise ValueError("z must be >= 0")


def generate(model, n: int, seed=None) -> Graph:
    """Draw a graph with n nodes from the given degree model."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = as_generator(seed)
    if isinstance(model, PoissonFixedM):
        return _generate_fixed_m(model.alpha, n, rng)
    if isinstance(model, GNP):
        return _generate_gnp(model.z, n, rng)
    if isinstance(model, Regular):
        return _generate_regular(model.z, n, rng)
    raise TypeError(f"unknown degree model: {model!r}")


def _generate_fixed_m(alpha: float, n: int, rng) -> Graph:
    m = round(alpha * n)
    max_m = n * (n - 1) // 2
    if m > max_m:
        raise ValueError(f"alpha*n = {m} exceeds the {max_m} available pairs")
    if m > max_m // 2:
        # dense regime: enumerate pairs and draw without replacement
        pairs = np.array([(i, j) for i in range(n) for j in range(i + 1, n)])
        pick = rng.choice(max_m, size=m, replace=False)
        return Graph(n, pairs[pick])
    chosen = set()
    edges = np.empty((m, 2), dtype=np.int64)
    k = 0
    while k < m:
        i = int(rng.integers(0, n))
        j = int(rng.integers(0, n))
        if i == j:
            continue
        if i > j:
            i, j = j, i
        if (i, j) in chosen:
            continue
        chosen.add((i, j))
        edges[k, 0] = i
        edges[k, 1] = j
        k += 1
    return Graph(n, edges)


def _generate_gnp(z: float, n: int, rng) -> Graph:
    if n == 1:
        return Graph(1, np.empty((0, 2), dtype=np.int64))
    p = z / (n - 1)
    if p >= 1.0:
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        return Graph(n, np.array(pairs, dtype=np.int64))
    if p <= 0.0:
        return Graph(n, np.empty((0, 2), dtype=np.int64))
    # geometric skips over the ordered pair sequence: O(M) for sparse p
    edges = []
    log1mp = np.log1p(-p)
    i, j = 1, -1
    while i < n:
        r = rng.random()
        j = j + 1 + int(np.log1p(-r) / log1mp)
        while j >= i and i < n:
            j -= i
            i += 1
        if i < n:
            edges.append((j, i))
    return Graph(n, np.array(edges, dtype=np.int64).reshape(-1, 2))


def _generate_regular(z: int, n: int, rng, max_restarts: int = 500) -> Graph:
    if n * z % 2 != 0:
        raise ValueError("n*z must be even for a z-regular graph")
    if z >= n:
        raise ValueError("need z < n for a simple z-regular graph")
    if z == 0:
        return Graph(n, np.empty((0, 2), dtype=np.int64))
    stubs = np.repeat(np.arange(n, dtype=np.int64), z)
    for _ in range(max_restarts):
        rng.shuffle(stubs)
        a = stubs[0::2]
        b = stubs[1::2]
        if (a == b).any():
            continue
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        key = lo * n + hi
        if np.unique(key).size != key.size:
            continue
        return Graph(n, np.stack([lo, hi], axis=1))
    raise GenerationError(
        f"no simple {z}-regular pairing found in {max_restarts} restarts")


def local_tree_check(g: Graph, node: int, radius: int) -> bool:
    """True when the induced ball of the given radius around node is a tree."""
    if not 0 <= node < g.n_nodes:
        raise ValueError("node out of range")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    dist = {node: 0}
    frontier = [node]
    for d in range(radius):
        nxt = []
        for u in frontier:
            for v in g.neighbors(u):
                v = int(v)
                if v not in dist:
                    dist[v] = d + 1
                    nxt.append(v)
        frontier = nxt
    ball = dist.keys()
    induced_edges = 0
    for u in ball:
        for v in g.neighbors(u):
            if int(v) in ball:
                induced_edges += 1
    induced_edges //= 2
    return induced_edges == len(ball) - 1


def tree_fraction(g: Graph, radius: int, n_samples: int = 100, seed=None) -> float:
    """Fraction of sampled nodes whose radius-ball is cycle-free."""
    rng = as_generator(seed)
    nodes = rng.integers(0, g.n_nodes, size=n_samples)
    hits = sum(local_tree_check(g, int(u), radius) for u in nodes)
    return hits / n_samples


def giant_component_fraction(g: Graph) -> float:
    """Size of the largest connected component over n_nodes."""
    parent = np.arange(g.n_nodes, dtype=np.int64)

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in g.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    roots = np.array([find(i) for i in range(g.n_nodes)])
    _, counts = np.unique(roots, return_counts=True)
    return counts.max() / g.n_nodes


def write_edge_list(g: Graph, path) -> None:
    """Write "N M" then one sorted "i j" line per edge (i < j)."""
    with open(path, "w") as fh:
        fh.write(f"{g.n_nodes} {g.n_edges}\n")
        for a, b in g.edges:
            fh.write(f"{a} {b}\n")


def read_edge_list(path) -> Graph:
    """Read the edge-list format written by write_edge_list, validating it."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("malformed header, expected 'N M'")
        n, m = int(header[0]), int(header[1])
        edges = np.empty((m, 2), dtype=np.int64)
        for k in range(m):
            parts = fh.readline().split()
            if len(parts) != 2:
                raise ValueError(f"malformed edge line {k + 2}")
            i, j = int(parts[0]), int(parts[1])
            if not i < j:
                raise ValueError(f"edge line {k + 2}: endpoints must satisfy i < j")
            edges[k, 0] = i
            edges[k, 1] = j
        if fh.readline().strip():
            raise ValueError("trailing content after the declared edge count")
    return Graph(n, edges)
