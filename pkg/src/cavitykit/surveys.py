"""Survey propagation for q-coloring.

A survey is a probability vector over the q+1 warning values a directed
edge can carry: entry 0 is the white mass, entry c the mass on color c.
Combining incoming surveys assumes they are independent, sums over all
incoming warning tuples, drops the contradictory ones, and renormalizes;
the dropped weight is reported as contradiction mass.

The trivial all-white fixed point always exists. In the clustered regime
a nontrivial fixed point appears and node marginals acquire color bias;
decimation fixes the most biased nodes and hands the leftover paramagnet
to a greedy coloring with local search.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .coloring import energy
from .errors import AllForbiddenError
from .graphs import Graph
from .rng import as_generator

__all__ = [
    "SPParams",
    "SurveyState",
    "SPRun",
    "DecimationParams",
    "DecimationResult",
    "pure_white_survey",
    "pure_color_survey",
    "biased_survey",
    "combine_distribution",
    "sp_update_message",
    "sp_fixed_point",
    "node_marginal",
    "node_biases",
    "decimate_solve",
]

STATUS_CONVERGED = "converged"
STATUS_NON_CONVERGED = "non_converged"
STATUS_UNSAT = "unsat_signal"

NORMALIZATION_TOL = 1e-9


def pure_white_survey(q: int) -> np.ndarray:
    out = np.zeros(q + 1)
    out[0] = 1.0
    return out


def pure_color_survey(c: int, q: int) -> np.ndarray:
    if not 1 <= c <= q:
        raise ValueError(f"color must lie in 1..{q}")
    out = np.zeros(q + 1)
    out[c] = 1.0
    return out


def biased_survey(c: int, q: int, eta: float) -> np.ndarray:
    """Mass 1-eta on color c plus eta spread over all q+1 values.

    Keeps every entry positive for eta > 0, so combines can never hit an
    exactly all-forbidden tuple by initialization alone.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    out = np.full(q + 1, eta / (q + 1))
    out[c] += 1.0 - eta
    return out


def _check_survey(v, q: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (q + 1,):
        raise ValueError(f"survey must have length {q + 1}")
    if (v < 0).any():
        raise ValueError("survey entries must be nonnegative")
    if abs(v.sum() - 1.0) > NORMALIZATION_TOL:
        raise ValueError("survey must sum to 1")
    return v


def combine_distribution(incoming, q: int):
    """Survey a node sends given the independent surveys it receives.

    Returns (survey, contradiction_mass). Runs the forbidden-subset
    dynamic program: state[F] is the probability that the incoming warning
    tuple forbids exactly the color set F. Raises AllForbiddenError when
    the contradiction mass is 1.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    rows = [_check_survey(v, q) for v in incoming]
    n_states = 1 << q
    state = np.zeros(n_states)
    state[0] = 1.0
    masks = np.arange(n_states)
    for s in rows:
        new = s[0] * state
        for c in range(1, q + 1):
            np.add.at(new, masks | (1 << (c - 1)), s[c] * state)
        state = new
    full = n_states - 1
    contradiction = float(state[full])
    popcounts = np.array([bin(f).count("1") for f in range(n_states)])
    out = np.empty(q + 1)
    out[0] = state[popcounts <= q - 2].sum()
    for c in range(1, q + 1):
        out[c] = state[full ^ (1 << (c - 1))]
    total = out.sum()
    if total <= 0.0:
        raise AllForbiddenError("every color is forbidden: contradiction mass 1")
    return out / total, contradiction


@dataclass(frozen=True)
class SPParams:
    damping: float = 0.2
    tol: float = 1e-6
    max_sweeps: int = 2000
    init_eta: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.damping < 1.0:
            raise ValueError("damping must lie in [0, 1)")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if not 0.0 < self.init_eta <= 1.0:
            raise ValueError("init_eta must lie in (0, 1]")


@dataclass
class SurveyState:
    """Directed surveys over a graph's CSR slots.

    messages[p] is the survey sent to node graph.slot_row[p] by its
    neighbor graph.indices[p]. forbid_mask holds per-node hard-forbidden
    color bitmasks and active flags nodes still in play; both are used by
    decimation and stay trivial for a plain run.
    """
    graph: Graph
    q: int
    messages: np.ndarray
    forbid_mask: np.ndarray
    active: np.ndarray
    damping: float = 0.2

    def message(self, src: int, dst: int) -> np.ndarray:
        return self.messages[self.graph.slot_of(src, dst)].copy()

    def _buffers(self):
        q = self.q
        return (np.zeros(1 << q), np.zeros(1 << q),
                np.zeros((self.graph.degrees().max(initial=1) + 1, q + 1)),
                np.zeros(q + 1))


def _initial_state(g: Graph, q: int, rng, params: SPParams) -> SurveyState:
    n_slots = g.indices.size
    eta = params.init_eta
    messages = np.full((n_slots, q + 1), eta / (q + 1))
    colors = rng.integers(1, q + 1, size=n_slots)
    messages[np.arange(n_slots), colors] += 1.0 - eta
    return SurveyState(
        graph=g, q=q, messages=messages,
        forbid_mask=np.zeros(g.n_nodes, dtype=np.int64),
        active=np.ones(g.n_nodes, dtype=np.bool_),
        damping=params.damping,
    )


@dataclass
class SPRun:
    state: SurveyState
    status: str
    sweeps: int
    max_delta: float


def sp_update_message(state: SurveyState, src: int, dst: int) -> np.ndarray:
    """One damped asynchronous update of the survey src -> dst, in place.

    Reference implementation of what a kernel sweep does per slot; combines
    the surveys into src from its other active neighbors over the node's
    hard-forbidden mask, blends with the old value, and renormalizes.
    """
    g, q = state.graph, state.q
    incoming = []
    extra = [pure_color_survey(c, q)
             for c in range(1, q + 1)
             if state.forbid_mask[src] & (1 << (c - 1))]
    for pp in range(g.indptr[src], g.indptr[src + 1]):
        j = int(g.indices[pp])
        if j != dst and state.active[j]:
            incoming.append(state.messages[pp])
    combined, _ = combine_distribution(incoming + extra, q)
    p = g.slot_of(src, dst)
    blended = state.damping * state.messages[p] + (1.0 - state.damping) * combined
    blended /= blended.sum()
    state.messages[p] = blended
    return blended.copy()


def sp_fixed_point(g: Graph, q: int, seed=None, params: SPParams | None = None,
                   state: SurveyState | None = None) -> SPRun:
    """Iterate surveys to a fixed point with damped asynchronous sweeps.

    Messages start as random-color biased surveys unless a prepared state
    is passed in. Each sweep updates every directed edge once in a fresh
    random order; convergence is max entry change below params.tol. An
    exactly all-forbidden combine stops the run with the unsat signal.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    params = params or SPParams()
    rng = as_generator(seed)
    if state is None:
        state = _initial_state(g, q, rng, params)
    state.damping = params.damping
    buf_state, buf_new, gathered, out = state._buffers()
    n_slots = g.indices.size
    status = STATUS_NON_CONVERGED
    max_delta = np.inf
    sweeps = 0
    for sweep in range(1, params.max_sweeps + 1):
        order = rng.permutation(n_slots)
        max_delta, unsat = _kernels.sp_sweep(
            g.indptr, g.indices, g.slot_row, state.messages, order,
            params.damping, state.forbid_mask, state.active, q,
            buf_state, buf_new, gathered, out)
        sweeps = sweep
        if unsat:
            status = STATUS_UNSAT
            break
        if max_delta < params.tol:
            status = STATUS_CONVERGED
            break
    return SPRun(state=state, status=status, sweeps=sweeps,
                 max_delta=float(max_delta))


def node_marginal(state: SurveyState, i: int) -> np.ndarray:
    """Full marginal of node i: combine of all its incoming surveys."""
    g, q = state.graph, state.q
    incoming = [state.messages[pp]
                for pp in range(g.indptr[i], g.indptr[i + 1])
                if state.active[g.indices[pp]]]
    extra = [pure_color_survey(c, q)
             for c in range(1, q + 1)
             if state.forbid_mask[i] & (1 << (c - 1))]
    marginal, _ = combine_distribution(incoming + extra, q)
    return marginal


def node_biases(state: SurveyState) -> np.ndarray:
    """Per-node color bias 1 - P(white); NaN on inactive nodes.

    Raises AllForbiddenError if any active node has contradiction mass 1.
    """
    g, q = state.graph, state.q
    buf_state, buf_new, gathered, out = state._buffers()
    marginals = np.empty((g.n_nodes, q + 1))
    bad = _kernels.sp_node_marginals(
        g.indptr, g.indices, state.messages, state.forbid_mask, state.active,
        q, buf_state, buf_new, gathered, out, marginals)
    if bad:
        raise AllForbiddenError(f"{bad} nodes have contradiction mass 1")
    biases = 1.0 - marginals[:, 0]
    biases[~state.active] = np.nan
    return biases


@dataclass(frozen=True)
class DecimationParams:
    bias_floor: float = 0.05
    ls_steps_per_node: int = 10
    sp: SPParams = field(default_factory=SPParams)


@dataclass
class DecimationResult:
    success: bool
    coloring: np.ndarray | None
    stage: str
    rounds: int
    diagnostics: dict


def _greedy_residual(g: Graph, q: int, fixed: np.ndarray, forbid: np.ndarray,
                     rng) -> np.ndarray:
    """Color unfixed nodes greedily, descending degree, fewest conflicts."""
    colors = fixed.copy()
    deg = g.degrees()
    for u in sorted(np.flatnonzero(fixed == 0), key=lambda v: -deg[v]):
        allowed = [c for c in range(1, q + 1) if not forbid[u] & (1 << (c - 1))]
        if not allowed:
            allowed = list(range(1, q + 1))
        counts = {c: 0 for c in allowed}
        for v in g.neighbors(u):
            cv = colors[v]
            if cv in counts:
                counts[cv] += 1
        best = min(counts.values())
        ties = [c for c in allowed if counts[c] == best]
        colors[u] = ties[int(rng.integers(0, len(ties)))]
    return colors


LOCAL_SEARCH_NOISE = 0.35


def _local_search(g: Graph, q: int, colors: np.ndarray, movable: np.ndarray,
                  steps: int, rng) -> int:
    """Min-conflict moves with noise on movable nodes; returns final energy.

    Each step recolors a random conflicted node: usually to a least-conflict
    color other than its own, but with probability LOCAL_SEARCH_NOISE to a
    uniformly random other color, which lets the walk climb out of the
    frustrated clusters where pure descent stalls.
    """
    conflicts = np.zeros(g.n_nodes, dtype=np.int64)
    for a, b in g.edges:
        if colors[a] == colors[b]:
            conflicts[a] += 1
            conflicts[b] += 1
    unhappy = set(np.flatnonzero((conflicts > 0) & movable).tolist())
    for _ in range(steps):
        if not unhappy:
            break
        u = list(unhappy)[int(rng.integers(0, len(unhappy)))]
        old = colors[u]
        if rng.random() < LOCAL_SEARCH_NOISE:
            others = [c for c in range(1, q + 1) if c != old]
            new = others[int(rng.integers(0, len(others)))]
        else:
            counts = np.zeros(q + 1, dtype=np.int64)
            for v in g.neighbors(u):
                counts[colors[v]] += 1
            best = counts[1:].min()
            ties = [c for c in range(1, q + 1)
                    if counts[c] == best and c != old]
            if not ties:
                # own color is the unique minimum; only noise can move it
                continue
            new = ties[int(rng.integers(0, len(ties)))]
        colors[u] = new
        for v in g.neighbors(u):
            v = int(v)
            if colors[v] == old:
                conflicts[v] -= 1
                conflicts[u] -= 1
                if conflicts[v] == 0:
                    unhappy.discard(v)
                elif movable[v]:
                    unhappy.add(v)
            elif colors[v] == new:
                conflicts[v] += 1
                conflicts[u] += 1
                if movable[v]:
                    unhappy.add(v)
        if conflicts[u] == 0:
            unhappy.discard(u)
        elif movable[u]:
            unhappy.add(u)
    total = 0
    for a, b in g.edges:
        if colors[a] == colors[b]:
            total += 1
    return total


def _propagate(g: Graph, q: int, fixed: np.ndarray, forbid: np.ndarray,
               start: int) -> bool:
    """Unit propagation after fixing start; False on an emptied color list."""
    queue = [start]
    while queue:
        u = queue.pop()
        bit = 1 << (fixed[u] - 1)
        for v in map(int, g.neighbors(u)):
            if fixed[v]:
                if fixed[v] == fixed[u]:
                    return False
                continue
            if forbid[v] & bit:
                continue
            forbid[v] |= bit
            free = [c for c in range(1, q + 1) if not forbid[v] & (1 << (c - 1))]
            if not free:
                return False
            if len(free) == 1:
                fixed[v] = free[0]
                queue.append(v)
    return True


def decimate_solve(g: Graph, q: int, seed=None,
                   params: DecimationParams | None = None) -> DecimationResult:
    """Color a graph by survey-guided decimation.

    Rounds of: converge surveys on the unfixed subgraph; if every node is
    nearly white (max bias under bias_floor) hand the residual to greedy
    coloring plus min-conflict local search, otherwise fix the most biased
    node to its top color and unit-propagate. Any returned coloring is
    re-verified to have energy 0.
    """
    if q < 2:
        raise ValueError("q must be >= 2")
    params = params or DecimationParams()
    rng = as_generator(seed)
    n = g.n_nodes
    fixed = np.zeros(n, dtype=np.int64)
    forbid = np.zeros(n, dtype=np.int64)
    diagnostics: dict = {"sp_statuses": []}
    rounds = 0
    while True:
        rounds += 1
        active = fixed == 0
        if not active.any():
            break
        state = _initial_state(g, q, rng, params.sp)
        state.forbid_mask = forbid
        state.active = active
        run = sp_fixed_point(g, q, seed=rng, params=params.sp, state=state)
        diagnostics["sp_statuses"].append(run.status)
        if run.status == STATUS_UNSAT:
            diagnostics["n_fixed"] = int((fixed > 0).sum())
            return DecimationResult(False, None, "sp_unsat", rounds, diagnostics)
        try:
            biases = node_biases(run.state)
        except AllForbiddenError:
            diagnostics["n_fixed"] = int((fixed > 0).sum())
            return DecimationResult(False, None, "sp_unsat", rounds, diagnostics)
        max_bias = np.nanmax(biases)
        if max_bias < params.bias_floor:
            colors = _greedy_residual(g, q, fixed, forbid, rng)
            residual = _local_search(g, q, colors, active,
                                     params.ls_steps_per_node * int(active.sum()),
                                     rng)
            diagnostics["residual_conflicts"] = int(residual)
            if residual == 0 and energy(g, colors, q) == 0:
                return DecimationResult(True, colors, "local_search", rounds,
                                        diagnostics)
            diagnostics["n_fixed"] = int((fixed > 0).sum())
            return DecimationResult(False, None, "local_search", rounds,
                                    diagnostics)
        u = int(np.nanargmax(biases))
        marginal = node_marginal(run.state, u)
        fixed[u] = int(np.argmax(marginal[1:]) + 1)
        if not _propagate(g, q, fixed, forbid, u):
            diagnostics["n_fixed"] = int((fixed > 0).sum())
            return DecimationResult(False, None, "propagation", rounds,
                                    diagnostics)
    colors = fixed
    if energy(g, colors, q) == 0:
        return DecimationResult(True, colors, "propagation", rounds, diagnostics)
    return DecimationResult(False, None, "verification", rounds, diagnostics)
