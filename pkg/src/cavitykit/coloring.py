"""Zero-temperature warning propagation for graph q-coloring.

A proper q-coloring assigns colors 1..q so no edge is monochromatic; the
energy of an assignment counts monochromatic edges. Warnings are integers:

* ``WHITE`` (0): the sender leaves the receiver free,
* color c (1..q): the sender needs the receiver to avoid c,
* ``CONTRADICTION`` (-1): the sender itself had no color left.

A node receiving warnings collects the forbidden colors from its colored
incoming messages; two or more free colors means it sends WHITE, exactly
one free color means it must claim that color, zero means contradiction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError
from .graphs import Graph
from .rng import as_generator

__all__ = [
    "WHITE",
    "CONTRADICTION",
    "WarningState",
    "WPRun",
    "energy",
    "exact_min_energy",
    "forbid_map",
    "combine_warnings",
    "allowed_colors",
    "wp_fixed_point",
    "whitening_from_coloring",
]

WHITE = 0
CONTRADICTION = -1

STATUS_CONVERGED = "converged"
STATUS_NON_CONVERGED = "non_converged"
STATUS_CONTRADICTION = "contradiction_found"


def _check_coloring(g: Graph, coloring, q: int) -> np.ndarray:
    coloring = np.asarray(coloring, dtype=np.int64)
    if coloring.shape != (g.n_nodes,):
        raise ValueError("coloring must assign one color per node")
    if coloring.size and (coloring.min() < 1 or coloring.max() > q):
        raise ValueError(f"colors must lie in 1..{q}")
    return coloring


def energy(g: Graph, coloring, q: int) -> int:
    """Number of monochromatic edges under the assignment."""
    coloring = _check_coloring(g, coloring, q)
    if g.n_edges == 0:
        return 0
    return int((coloring[g.edges[:, 0]] == coloring[g.edges[:, 1]]).sum())


def exact_min_energy(g: Graph, q: int, node_budget: int = 5_000_000):
    """Ground-state energy by branch and bound, with one optimal coloring.

    Nodes are assigned in descending-degree order; partial assignments are
    pruned against the incumbent. The first node's color is pinned to 1,
    which is harmless by color symmetry. Search effort is capped by
    node_budget visited partial assignments.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    n = g.n_nodes
    order = sorted(range(n), key=lambda u: -len(g.neighbors(u)))
    rank = {u: t for t, u in enumerate(order)}
    # neighbors already placed earlier in the order, per node
    earlier = [[v for v in map(int, g.neighbors(u)) if rank[v] < rank[u]]
               for u in order]

    best_energy = g.n_edges + 1
    best_coloring = None
    assign = np.zeros(n, dtype=np.int64)
    visited = 0

    def descend(t: int, cost: int):
        nonlocal best_energy, best_coloring, visited
        if cost >= best_energy:
            return
        if t == n:
            best_energy = cost
            best_coloring = assign.copy()
            return
        visited += 1
        if visited > node_budget:
            raise CapabilityError(
                f"exact_min_energy exceeded node_budget={node_budget}")
        u = order[t]
        colors = (1,) if t == 0 else range(1, q + 1)
        for c in colors:
            assign[u] = c
            added = sum(1 for v in earlier[t] if assign[v] == c)
            descend(t + 1, cost + added)
            if best_energy == 0:
                return
        assign[u] = 0

    descend(0, 0)
    return best_energy, best_coloring


def forbid_map(allowed) -> frozenset:
    """Forbidden set induced by an allowed-color list: binding only if unique."""
    allowed = frozenset(allowed)
    if not allowed:
        raise ValueError("allowed-color list must be nonempty")
    if len(allowed) == 1:
        return allowed
    return frozenset()


def combine_warnings(incoming, q: int) -> int:
    """Warning a node emits given the warnings it receives.

    Colored warnings forbid their color; WHITE and CONTRADICTION forbid
    nothing. Two or more free colors -> WHITE; exactly one -> that color;
    none -> CONTRADICTION.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    forbidden = 0
    for w in incoming:
        if w > 0:
            if w > q:
                raise ValueError(f"warning {w} outside 1..{q}")
            forbidden |= 1 << (w - 1)
    free = q - bin(forbidden).count("1")
    if free >= 2:
        return WHITE
    if free == 0:
        return CONTRADICTION
    for c in range(1, q + 1):
        if not forbidden & (1 << (c - 1)):
            return c
    raise AssertionError("unreachable")


def allowed_colors(incoming, q: int) -> list[int]:
    """Colors not forbidden by any incoming warning, ascending."""
    forbidden = {w for w in incoming if w > 0}
    return [c for c in range(1, q + 1) if c not in forbidden]


@dataclass
class WarningState:
    """Directed warning messages over a graph's CSR slots.

    messages[p] is the warning sent to node graph.slot_row[p] by its
    neighbor graph.indices[p].
    """
    graph: Graph
    q: int
    messages: np.ndarray

    def message(self, src: int, dst: int) -> int:
        return int(self.messages[self.graph.slot_of(src, dst)])

    def node_warning(self, i: int) -> int:
        g = self.graph
        inc = self.messages[g.indptr[i]:g.indptr[i + 1]]
        return combine_warnings(inc, self.q)

    def node_warnings(self) -> np.ndarray:
        return np.array([self.node_warning(i) for i in range(self.graph.n_nodes)],
                        dtype=np.int64)

    def histogram(self) -> dict:
        """Node-level warning counts keyed 'white', 'color_c', 'contradiction'."""
        values = self.node_warnings()
        out = {"white": int((values == WHITE).sum())}
        for c in range(1, self.q + 1):
            out[f"color_{c}"] = int((values == c).sum())
        out["contradiction"] = int((values == CONTRADICTION).sum())
        return out


@dataclass
class WPRun:
    state: WarningState
    status: str
    sweeps: int
    history: list | None = None


def _wp_sweeps(g: Graph, q: int, messages: np.ndarray, max_sweeps: int,
               order_rng, track_history: bool):
    """Asynchronous warning updates until a full sweep changes nothing."""
    n_slots = messages.size
    history = [] if track_history else None
    for sweep in range(1, max_sweeps + 1):
        if order_rng is None:
            order = np.arange(n_slots)
        else:
            order = order_rng.permutation(n_slots)
        changed = 0
        for p in order:
            src = g.indices[p]
            dst = g.slot_row[p]
            forbidden = 0
            for pp in range(g.indptr[src], g.indptr[src + 1]):
                if g.indices[pp] != dst:
                    w = messages[pp]
                    if w > 0:
                        forbidden |= 1 << (w - 1)
            free = q - bin(forbidden).count("1")
            if free >= 2:
                new = WHITE
            elif free == 0:
                new = CONTRADICTION
            else:
                new = next(c for c in range(1, q + 1)
                           if not forbidden & (1 << (c - 1)))
            if new != messages[p]:
                messages[p] = new
                changed += 1
        if track_history:
            history.append(messages.copy())
        if changed == 0:
            return sweep, True, history
    return max_sweeps, False, history


def wp_fixed_point(g: Graph, q: int, init="random", coloring=None, seed=None,
                   max_sweeps: int = 1000, track_history: bool = False) -> WPRun:
    """Run warning propagation to a fixed point.

    init "random" draws each message uniformly from {WHITE, 1..q} with the
    given seed; init "coloring" starts every message at the sender's color
    in the supplied assignment. Sweeps visit all directed edges in a fresh
    random order; convergence is a sweep with zero changes.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    n_slots = g.indices.size
    rng = as_generator(seed)
    if init == "random":
        messages = rng.integers(0, q + 1, size=n_slots).astype(np.int64)
    elif init == "coloring":
        if coloring is None:
            raise ValueError("init='coloring' needs a coloring")
        coloring = _check_coloring(g, coloring, q)
        messages = coloring[g.indices].copy()
    else:
        raise ValueError(f"unknown init {init!r}")

    sweeps, converged, history = _wp_sweeps(
        g, q, messages, max_sweeps, rng, track_history)
    state = WarningState(graph=g, q=q, messages=messages)
    # transient contradictions from an arbitrary init carry no information;
    # only the fixed point is judged, at both message and node level
    if converged:
        if CONTRADICTION in messages or CONTRADICTION in state.node_warnings():
            status = STATUS_CONTRADICTION
        else:
            status = STATUS_CONVERGED
    else:
        status = STATUS_NON_CONVERGED
    return WPRun(state=state, status=status, sweeps=sweeps, history=history)


def whitening_from_coloring(g: Graph, coloring, q: int,
                            track_history: bool = False):
    """Per-node warnings after relaxing a proper coloring's messages.

    Starts every directed message at the sender's color and iterates with a
    deterministic sweep order; from a proper coloring messages only ever
    bleach toward WHITE, so the fixed point is reached in at most one sweep
    per message and is independent of update order.

    Returns (node_warnings, run).
    """
    coloring = _check_coloring(g, coloring, q)
    if energy(g, coloring, q) != 0:
        raise ValueError("whitening needs a proper coloring (energy 0)")
    messages = coloring[g.indices].copy()
    max_sweeps = g.indices.size + 2
    sweeps, converged, history = _wp_sweeps(
        g, q, messages, max_sweeps, None, track_history)
    assert converged and CONTRADICTION not in messages
    state = WarningState(graph=g, q=q, messages=messages)
    run = WPRun(state=state, status=STATUS_CONVERGED, sweeps=sweeps,
                history=history)
    return state.node_warnings(), run
