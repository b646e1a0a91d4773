"""Numba kernels for survey updates and population dynamics.

Surveys are float64 vectors of length q+1: index 0 is the white (free)
mass, index c is the mass on color c. The combine rule runs a dynamic
program over forbidden-color subsets encoded as bitmasks: folding one
incoming survey either leaves the forbidden set (white mass) or inserts
one color. A final popcount split maps subset masses to the outgoing
survey; mass on the full subset is the contradiction weight.

All randomness here uses numba's internal RNG; callers seed it per call
through seed_kernel with integers spawned from their own generator.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def seed_kernel(seed):
    np.random.seed(seed)


@njit(cache=True)
def combine_core(msgs, count, base_mask, q, state, new_state, out):
    """Combine `count` surveys (rows of msgs) into out; returns contradiction mass.

    base_mask pre-forbids colors (hard constraints). out is renormalized
    over non-contradictory values; if everything is contradictory returns
    1.0 and out is untouched.
    """
    n_states = 1 << q
    for f in range(n_states):
        state[f] = 0.0
    state[base_mask] = 1.0
    for t in range(count):
        for f in range(n_states):
            new_state[f] = msgs[t, 0] * state[f]
        for c in range(q):
            b = 1 << c
            w = msgs[t, c + 1]
            if w > 0.0:
                for f in range(n_states):
                    if state[f] > 0.0:
                        new_state[f | b] += w * state[f]
        for f in range(n_states):
            state[f] = new_state[f]
    full = n_states - 1
    contra = state[full]
    white = 0.0
    for f in range(n_states):
        pc = 0
        x = f
        while x:
            pc += x & 1
            x >>= 1
        if pc <= q - 2:
            white += state[f]
    total = white
    for c in range(q):
        v = state[full ^ (1 << c)]
        total += v
    if total <= 0.0:
        return 1.0
    inv = 1.0 / total
    out[0] = white * inv
    for c in range(q):
        out[c + 1] = state[full ^ (1 << c)] * inv
    return contra


@njit(cache=True)
def sp_sweep(indptr, indices, slot_row, msgs, order, damping, forbid_mask,
             active, q, state, new_state, gathered, out):
    """One asynchronous survey sweep over the given slot order, in place.

    Returns (max_delta, unsat). msgs[p] is the survey sent to slot_row[p]
    by indices[p]; updating it combines the messages into indices[p] from
    its other active neighbors on top of that node's hard-forbidden mask.
    unsat=True means some update had contradiction mass 1, a certificate
    that the zero-energy sector is locally empty.
    """
    max_delta = 0.0
    for oi in range(order.size):
        p = order[oi]
        src = indices[p]
        dst = slot_row[p]
        if not active[src] or not active[dst]:
            continue
        count = 0
        for pp in range(indptr[src], indptr[src + 1]):
            j = indices[pp]
            if j != dst and active[j]:
                for c in range(q + 1):
                    gathered[count, c] = msgs[pp, c]
                count += 1
        contra = combine_core(gathered, count, forbid_mask[src], q,
                              state, new_state, out)
        if contra >= 1.0:
            return max_delta, True
        total = 0.0
        for c in range(q + 1):
            blended = damping * msgs[p, c] + (1.0 - damping) * out[c]
            out[c] = blended
            total += blended
        inv = 1.0 / total
        for c in range(q + 1):
            v = out[c] * inv
            d = abs(v - msgs[p, c])
            if d > max_delta:
                max_delta = d
            msgs[p, c] = v
    return max_delta, False


@njit(cache=True)
def sp_node_marginals(indptr, indices, msgs, forbid_mask, active, q,
                      state, new_state, gathered, out, marginals):
    """Full marginal of every active node; returns count of all-forbidden nodes.

    Inactive nodes get a row of -1.
    """
    n = indptr.size - 1
    bad = 0
    for i in range(n):
        if not active[i]:
            for c in range(q + 1):
                marginals[i, c] = -1.0
            continue
        count = 0
        for pp in range(indptr[i], indptr[i + 1]):
            j = indices[pp]
            if active[j]:
                for c in range(q + 1):
                    gathered[count, c] = msgs[pp, c]
                count += 1
        contra = combine_core(gathered, count, forbid_mask[i], q,
                              state, new_state, out)
        if contra >= 1.0:
            bad += 1
            for c in range(q + 1):
                marginals[i, c] = -1.0
        else:
            for c in range(q + 1):
                marginals[i, c] = out[c]
    return bad


@njit(cache=True)
def population_sweep(members, z, q, max_retries, state, new_state, out, gathered):
    """S asynchronous member replacements; returns 0, or -1 on collapse.

    Each replacement draws n ~ Poisson(z) random members, combines them,
    and overwrites a random member. All-forbidden draws are redrawn up to
    max_retries times.
    """
    S = members.shape[0]
    cap = gathered.shape[0]
    for _ in range(S):
        ok = False
        for _retry in range(max_retries):
            n = np.random.poisson(z)
            if n > cap:
                continue
            for t in range(n):
                row = np.random.randint(0, S)
                for c in range(q + 1):
                    gathered[t, c] = members[row, c]
            contra = combine_core(gathered, n, 0, q, state, new_state, out)
            if contra < 1.0:
                ok = True
                break
        if not ok:
            return -1
        tgt = np.random.randint(0, S)
        for c in range(q + 1):
            members[tgt, c] = out[c]
    return 0


@njit(cache=True)
def draw_marginal(members, z, q, max_retries, state, new_state, out, gathered):
    """Synthesize one full node marginal from n ~ Poisson(z) member draws."""
    S = members.shape[0]
    cap = gathered.shape[0]
    for _retry in range(max_retries):
        n = np.random.poisson(z)
        if n > cap:
            continue
        for t in range(n):
            row = np.random.randint(0, S)
            for c in range(q + 1):
                gathered[t, c] = members[row, c]
        contra = combine_core(gathered, n, 0, q, state, new_state, out)
        if contra < 1.0:
            return 0
    return -1


@njit(cache=True)
def delta_sigma_edge(members, z, q, samples, max_retries):
    """Edge-addition free-entropy shift samples.

    Returns (sum, sum_of_squares, accepted, rejected) of
    ln(1 - sum_c m1[c] m2[c]) over pairs of synthesized full marginals;
    nonpositive arguments and failed marginal draws count as rejected.
    """
    state = np.zeros(1 << q)
    new_state = np.zeros(1 << q)
    m1 = np.zeros(q + 1)
    m2 = np.zeros(q + 1)
    gathered = np.zeros((128, q + 1))
    total = 0.0
    totsq = 0.0
    accepted = 0
    rejected = 0
    for _ in range(samples):
        if draw_marginal(members, z, q, max_retries, state, new_state, m1,
                         gathered) != 0:
            rejected += 1
            continue
        if draw_marginal(members, z, q, max_retries, state, new_state, m2,
                         gathered) != 0:
            rejected += 1
            continue
        arg = 1.0
        for c in range(q):
            arg -= m1[c + 1] * m2[c + 1]
        if arg <= 0.0:
            rejected += 1
            continue
        v = np.log(arg)
        total += v
        totsq += v * v
        accepted += 1
    return total, totsq, accepted, rejected


@njit(cache=True)
def delta_sigma_site(members, z, q, samples, max_retries):
    """Site-addition free-entropy shift samples.

    A new node with k ~ Poisson(z) links is colorable unless its neighbors'
    warnings cover all q colors; the probability of that is computed by
    inclusion-exclusion over nonempty color subsets from the k synthesized
    neighbor marginals. Returns (sum, sum_of_squares, accepted, rejected)
    of the log-probabilities.
    """
    state = np.zeros(1 << q)
    new_state = np.zeros(1 << q)
    marg = np.zeros((128, q + 1))
    gathered = np.zeros((128, q + 1))
    total = 0.0
    totsq = 0.0
    accepted = 0
    rejected = 0
    for _ in range(samples):
        k = np.random.poisson(z)
        if k > 128:
            rejected += 1
            continue
        bad = False
        for j in range(k):
            if draw_marginal(members, z, q, max_retries, state, new_state,
                             marg[j], gathered) != 0:
                bad = True
                break
        if bad:
            rejected += 1
            continue
        p = 0.0
        for mask in range(1, 1 << q):
            pc = 0
            x = mask
            while x:
                pc += x & 1
                x >>= 1
            prod = 1.0
            for j in range(k):
                s = 0.0
                for c in range(q):
                    if mask & (1 << c):
                        s += marg[j, c + 1]
                prod *= 1.0 - s
            if pc % 2 == 1:
                p += prod
            else:
                p -= prod
        if p <= 0.0:
            rejected += 1
            continue
        v = np.log(p)
        total += v
        totsq += v * v
        accepted += 1
    return total, totsq, accepted, rejected
