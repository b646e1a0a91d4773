"""Survey algebra against brute-force enumeration, SP runs, decimation."""
import itertools

import numpy as np
import pytest

from cavitykit import coloring, graphs, surveys
from cavitykit.errors import AllForbiddenError
from cavitykit.rng import as_generator


def random_survey(rng, q):
    v = rng.random(q + 1)
    return v / v.sum()


def brute_combine(incoming, q):
    """Enumerate warning tuples with product weights; the DP must match."""
    out = np.zeros(q + 1)
    contra = 0.0
    for tup in itertools.product(range(q + 1), repeat=len(incoming)):
        w = 1.0
        for row, t in zip(incoming, tup):
            w *= row[t]
        result = coloring.combine_warnings([t for t in tup if t > 0], q)
        if result == coloring.CONTRADICTION:
            contra += w
        else:
            out[result] += w
    return out / out.sum(), contra


def test_combine_distribution_matches_enumeration():
    rng = as_generator(2)
    for q in (2, 3, 4):
        for m in (0, 1, 2, 3, 4):
            incoming = [random_survey(rng, q) for _ in range(m)]
            got, got_contra = surveys.combine_distribution(incoming, q)
            want, want_contra = brute_combine(incoming, q)
            np.testing.assert_allclose(got, want, atol=1e-12)
            assert got_contra == pytest.approx(want_contra, abs=1e-12)


def test_combine_distribution_pure_colors_reduce_to_warnings():
    q = 3
    for inc_colors in itertools.product(range(q + 1), repeat=3):
        incoming = [surveys.pure_color_survey(c, q) if c > 0
                    else surveys.pure_white_survey(q) for c in inc_colors]
        expect = coloring.combine_warnings([c for c in inc_colors if c > 0], q)
        if expect == coloring.CONTRADICTION:
            with pytest.raises(AllForbiddenError):
                surveys.combine_distribution(incoming, q)
        else:
            got, contra = surveys.combine_distribution(incoming, q)
            want = np.zeros(q + 1)
            want[expect] = 1.0
            np.testing.assert_allclose(got, want, atol=1e-12)


def test_combine_distribution_normalized_output():
    rng = as_generator(8)
    for _ in range(50):
        q = int(rng.integers(2, 5))
        incoming = [random_survey(rng, q) for _ in range(int(rng.integers(1, 5)))]
        got, _ = surveys.combine_distribution(incoming, q)
        assert got.sum() == pytest.approx(1.0, abs=surveys.NORMALIZATION_TOL)
        assert (got >= 0).all()


def test_combine_distribution_permutation_equivariance():
    rng = as_generator(21)
    q = 3
    incoming = [random_survey(rng, q) for _ in range(3)]
    got, contra = surveys.combine_distribution(incoming, q)
    perm = rng.permutation(q) + 1
    permuted = []
    for row in incoming:
        new = row.copy()
        for c in range(1, q + 1):
            new[perm[c - 1]] = row[c]
        permuted.append(new)
    got_p, contra_p = surveys.combine_distribution(permuted, q)
    for c in range(1, q + 1):
        assert got_p[perm[c - 1]] == pytest.approx(got[c], abs=1e-12)
    assert got_p[0] == pytest.approx(got[0], abs=1e-12)
    assert contra_p == pytest.approx(contra, abs=1e-12)


def test_survey_constructors():
    q = 3
    assert surveys.pure_white_survey(q).tolist() == [1.0, 0, 0, 0]
    assert surveys.pure_color_survey(2, q).tolist() == [0, 0, 1.0, 0]
    b = surveys.biased_survey(1, q, eta=0.2)
    assert b.sum() == pytest.approx(1.0)
    assert b[1] == pytest.approx(0.8 + 0.05)
    with pytest.raises(ValueError):
        surveys.pure_color_survey(0, q)


def test_sp_params_validation():
    with pytest.raises(ValueError):
        surveys.SPParams(damping=1.0)
    with pytest.raises(ValueError):
        surveys.SPParams(tol=0.0)
    with pytest.raises(ValueError):
        surveys.SPParams(max_sweeps=0)
    with pytest.raises(ValueError):
        surveys.SPParams(init_eta=0.0)


def test_kernel_sweep_matches_reference_updates():
    g = graphs.generate(graphs.GNP(z=3.0), 60, seed=5)
    params = surveys.SPParams(max_sweeps=1)
    seed = 99
    run = surveys.sp_fixed_point(g, 3, seed=seed, params=params)

    rng = as_generator(seed)
    ref = surveys._initial_state(g, 3, rng, params)
    order = rng.permutation(g.indices.size)
    for p in order:
        surveys.sp_update_message(ref, int(g.indices[p]), int(g.slot_row[p]))
    np.testing.assert_allclose(run.state.messages, ref.messages, atol=1e-12)


def test_sp_trivial_on_tree():
    # on a tree every survey relaxes to white
    g = graphs.Graph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
    run = surveys.sp_fixed_point(g, 3, seed=1)
    assert run.status == surveys.STATUS_CONVERGED
    assert float(np.nanmax(surveys.node_biases(run.state))) < 1e-3


def test_sp_reproducible():
    g = graphs.generate(graphs.GNP(z=4.5), 500, seed=3)
    a = surveys.sp_fixed_point(g, 3, seed=11)
    b = surveys.sp_fixed_point(g, 3, seed=11)
    assert np.array_equal(a.state.messages, b.state.messages)
    assert a.sweeps == b.sweeps


def test_node_marginal_matches_kernel_route():
    g = graphs.generate(graphs.GNP(z=3.0), 80, seed=6)
    run = surveys.sp_fixed_point(g, 3, seed=2, params=surveys.SPParams(max_sweeps=5))
    biases = surveys.node_biases(run.state)
    for i in (0, 10, 40):
        m = surveys.node_marginal(run.state, i)
        assert 1.0 - m[0] == pytest.approx(biases[i], abs=1e-10)


def test_decimation_colors_triangle():
    g = graphs.Graph(3, [(0, 1), (1, 2), (0, 2)])
    res = surveys.decimate_solve(g, 3, seed=4)
    assert res.success
    assert coloring.energy(g, res.coloring, 3) == 0


def test_decimation_fails_on_k4():
    g = graphs.Graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    res = surveys.decimate_solve(g, 3, seed=4)
    assert not res.success
    assert res.coloring is None


def test_decimation_verified_energy_zero():
    for seed in range(3):
        g = graphs.generate(graphs.GNP(z=3.0), 800, seed=seed)
        res = surveys.decimate_solve(g, 3, seed=50 + seed)
        assert res.success
        assert coloring.energy(g, res.coloring, 3) == 0


def test_decimation_respects_qmin():
    g = graphs.Graph(2, [(0, 1)])
    with pytest.raises(ValueError):
        surveys.decimate_solve(g, 1, seed=0)
