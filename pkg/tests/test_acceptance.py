"""End-to-end acceptance runs, one test per headline capability.

Each test is a self-contained check of a quantitative target at its stated
tolerance; run with -v to get one pass/fail line per criterion. The slow
flagship scan sits last so the cheap checks report first.
"""
import itertools
import json
import math

import numpy as np
import pytest

from cavitykit import bethe, coloring, graphs, matching, population, surveys
from cavitykit.cli import dispatch
from cavitykit.rng import as_generator


def cycle(n):
    return graphs.Graph(n, [(i, (i + 1) % n) for i in range(n)])


def test_criterion_01_matching_mean_exact_n2():
    # mean optimal cost at n=2, exponential entries: 1 + 1/4
    stats = matching.ensemble_average(2, matching.Exponential(), 100_000,
                                      seed=20_001)
    assert abs(stats.mean_cost - 1.25) <= 3 * stats.std_error


def test_criterion_02_matching_mean_n100():
    stats = matching.ensemble_average(100, matching.Exponential(), 200,
                                      seed=20_002)
    target = matching.exponential_mean_exact(100)
    assert target == pytest.approx(1.6350, abs=5e-4)
    assert abs(stats.mean_cost - target) <= 3 * stats.std_error
    # at 200 samples the estimate is also consistent with the large-n limit
    assert abs(stats.mean_cost - matching.ZETA2) <= 3 * stats.std_error


def test_criterion_03_matching_finite_size_slope():
    # (mean - zeta(2)) * n settles near -1 for flat-at-zero densities
    plan = [(50, 16_000), (100, 28_000), (200, 38_000)]
    for n, samples in plan:
        stats = matching.ensemble_average(n, matching.Exponential(), samples,
                                          seed=20_003 + n)
        y = (stats.mean_cost - matching.ZETA2) * n
        sigma_y = stats.std_error * n
        assert abs(y - (-1.0)) <= 3 * sigma_y, \
            f"n={n}: slope estimate {y:.3f} +- {sigma_y:.3f}"


def test_criterion_04_matching_solver_oracle_equivalence():
    rng = as_generator(20_004)
    for trial in range(500):
        n = int(rng.integers(1, 8))
        if trial % 2:
            costs = matching.Exponential().sample((n, n), rng)
        else:
            costs = matching.UniformLinear(a=1.0).sample((n, n), rng)
        fast = matching.solve_exact(costs)
        slow = matching.brute_force(costs)
        assert fast.total_cost == slow.total_cost


def test_criterion_05_bethe_calibration():
    found = bethe.first_unstable_beta_j(4)
    assert abs(found - math.atanh(1.0 / 3.0)) < 1e-3
    for bj in np.arange(0.0, 10.25, 0.5):
        r = bethe.cavity_fixed_point(bethe.BetheParams(float(bj), 1.0, 2))
        assert abs(r.value) < 1e-6, f"z=2 beta*J={bj}: m_C={r.value}"


def test_criterion_06_coloring_oracles():
    k4 = graphs.Graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    assert coloring.exact_min_energy(k4, 3)[0] == 1
    for n in (3, 5, 7):
        assert coloring.exact_min_energy(cycle(n), 2)[0] == 1
    for n in (4, 6, 8):
        assert coloring.exact_min_energy(cycle(n), 2)[0] == 0


def test_criterion_07_sp_regimes():
    trivial = 0
    for seed in range(10):
        g = graphs.generate(graphs.GNP(z=3.0), 10_000, seed=seed)
        run = surveys.sp_fixed_point(g, 3, seed=20_070 + seed)
        max_bias = float(np.nanmax(surveys.node_biases(run.state)))
        trivial += (run.status == surveys.STATUS_CONVERGED
                    and max_bias < 1e-2)
    assert trivial >= 9, f"only {trivial}/10 trivial at z=3"

    nontrivial = 0
    for seed in range(5):
        g = graphs.generate(graphs.GNP(z=4.5), 30_000, seed=seed)
        run = surveys.sp_fixed_point(g, 3, seed=20_075 + seed)
        max_bias = float(np.nanmax(surveys.node_biases(run.state)))
        nontrivial += (max_bias > 0.1)
    assert nontrivial >= 3, f"only {nontrivial}/5 nontrivial at z=4.5"


def test_criterion_08_decimation_solver():
    solved = 0
    for seed in range(10):
        g = graphs.generate(graphs.GNP(z=3.0), 10_000, seed=seed)
        result = surveys.decimate_solve(g, 3, seed=20_080 + seed)
        if result.success:
            # independent re-verification of every returned coloring
            assert coloring.energy(g, result.coloring, 3) == 0
            solved += 1
    assert solved >= 9, f"only {solved}/10 colored at z=3"


def test_criterion_09_flagship_thresholds_full():
    grid = [4.30, 4.35, 4.40, 4.45, 4.50, 4.55, 4.60, 4.65, 4.70, 4.75]
    curve, th = population.threshold_scan(
        3, grid, S=100_000, sweeps=600, samples=100_000, seed=20_090,
        refine_steps=3)
    assert th.z_dynamic is not None and th.z_critical is not None
    assert abs(th.z_dynamic - 4.42) <= 0.05, f"z_d = {th.z_dynamic}"
    assert abs(th.z_critical - 4.69) <= 0.05, f"z_c = {th.z_critical}"
    # the branch value decreases with z, within errors
    branch = [p for p in curve.points if p.nontrivial]
    assert len(branch) >= 3
    for a, b in zip(branch, branch[1:]):
        slack = 3 * math.hypot(a.std_error, b.std_error)
        assert b.sigma <= a.sigma + slack, \
            f"sigma rose from z={a.z} to z={b.z}"


def test_criterion_09_flagship_thresholds_smoke():
    grid = [4.3, 4.4, 4.5, 4.6, 4.7, 4.8]
    curve, th = population.threshold_scan(
        3, grid, S=10_000, sweeps=300, samples=20_000, seed=20_091,
        refine_steps=2)
    assert th.z_dynamic is not None and th.z_critical is not None
    assert abs(th.z_dynamic - 4.42) <= 0.1, f"z_d = {th.z_dynamic}"
    assert abs(th.z_critical - 4.69) <= 0.1, f"z_c = {th.z_critical}"


def test_criterion_10_property_suites(tmp_path):
    rng = as_generator(20_100)

    # survey combination: normalization and brute-force tuple enumeration
    for q in (2, 3, 4):
        for m in (1, 2, 3, 4):
            incoming = []
            for _ in range(m):
                v = rng.random(q + 1)
                incoming.append(v / v.sum())
            got, got_contra = surveys.combine_distribution(incoming, q)
            assert got.sum() == pytest.approx(1.0, abs=1e-9)
            out = np.zeros(q + 1)
            contra = 0.0
            for tup in itertools.product(range(q + 1), repeat=m):
                w = 1.0
                for row, t in zip(incoming, tup):
                    w *= row[t]
                res = coloring.combine_warnings([t for t in tup if t > 0], q)
                if res == coloring.CONTRADICTION:
                    contra += w
                else:
                    out[res] += w
            np.testing.assert_allclose(got, out / out.sum(), atol=1e-12)
            assert got_contra == pytest.approx(contra, abs=1e-12)

    # color-permutation equivariance of the warning combine
    for _ in range(100):
        q = int(rng.integers(2, 5))
        inc = [int(rng.integers(-1, q + 1)) for _ in range(3)]
        out = coloring.combine_warnings(inc, q)
        perm = rng.permutation(q) + 1
        mapped = [int(perm[w - 1]) if w > 0 else w for w in inc]
        expect = int(perm[out - 1]) if out > 0 else out
        assert coloring.combine_warnings(mapped, q) == expect

    # the all-white message state is an absorbing fixed point
    g = graphs.generate(graphs.GNP(z=3.0), 500, seed=1)
    messages = np.zeros(g.indices.size, dtype=np.int64)
    sweeps, converged, _ = coloring._wp_sweeps(g, 3, messages, 5, None, False)
    assert converged and sweeps == 1 and (messages == coloring.WHITE).all()

    # whitening only ever bleaches
    res = surveys.decimate_solve(g, 3, seed=2)
    assert res.success
    _, run = coloring.whitening_from_coloring(g, res.coloring, 3,
                                              track_history=True)
    prev_white = np.zeros(g.indices.size, dtype=bool)
    for snap in run.history:
        now_white = snap == coloring.WHITE
        assert (now_white | ~prev_white).all()
        prev_white = now_white

    # byte-for-byte seed reproducibility of the command line entry points
    edges_a, edges_b = tmp_path / "a.edges", tmp_path / "b.edges"
    for out in (edges_a, edges_b):
        assert dispatch(["graph-gen", "--model", "gnp", "--n", "400", "--z",
                         "4.0", "--seed", "31", "-o", str(out)]) == 0
    assert edges_a.read_bytes() == edges_b.read_bytes()
    sp_a, sp_b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (sp_a, sp_b):
        assert dispatch(["sp-run", "--graph", str(edges_a), "--q", "3",
                         "--seed", "32", "-o", str(out)]) == 0
    assert sp_a.read_bytes() == sp_b.read_bytes()
    match_a, match_b = tmp_path / "ma.csv", tmp_path / "mb.csv"
    for out in (match_a, match_b):
        assert dispatch(["matching-ensemble", "--n", "10", "--samples", "60",
                         "--seed", "33", "-o", str(out)]) == 0
    assert match_a.read_bytes() == match_b.read_bytes()
