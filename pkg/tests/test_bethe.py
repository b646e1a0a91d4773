"""Fixed-point solvers checked against independent root finding."""
import itertools
import math

import numpy as np
import pytest
from scipy.optimize import brentq

from cavitykit import bethe
from cavitykit.errors import CapabilityError, IterationLimitError


def naive_root(beta_j, z):
    c = beta_j * z
    return brentq(lambda m: m - math.tanh(c * m), 1e-9, 1.0 - 1e-15)


def cavity_root(beta_j, z):
    t = math.tanh(beta_j)
    k = z - 1
    return brentq(lambda m: m - math.tanh(k * math.atanh(t * m)),
                  1e-9, 1.0 - 1e-15)


def test_naive_matches_root_finder():
    for bj, z in [(0.5, 4), (0.3, 4), (1.0, 2), (0.28, 4)]:
        got = bethe.naive_mean_field(bethe.BetheParams(bj, 1.0, z)).value
        assert got == pytest.approx(naive_root(bj, z), abs=1e-9)


def test_naive_zero_below_threshold():
    # m = tanh(bJ z m) has only the zero solution for bJ z < 1
    got = bethe.naive_mean_field(bethe.BetheParams(0.2, 1.0, 4)).value
    assert abs(got) < 1e-9


def test_cavity_matches_root_finder():
    for bj, z in [(0.4, 4), (0.6, 3), (1.5, 4), (0.36, 4)]:
        got = bethe.cavity_fixed_point(bethe.BetheParams(bj, 1.0, z)).value
        assert got == pytest.approx(cavity_root(bj, z), abs=1e-9)


def test_cavity_z2_always_zero():
    # (z-1) = 1 makes the recursion a pure contraction onto zero
    for bj in np.arange(0.0, 10.5, 0.5):
        r = bethe.cavity_fixed_point(bethe.BetheParams(float(bj), 1.0, 2))
        assert abs(r.value) < 1e-6, f"bj={bj}: {r.value}"


def test_local_mean_field_matches_enumeration():
    params = bethe.BetheParams(0.7, 1.0, 4)
    m = 0.3
    p_up = 0.5 * (1 + m)
    total = 0.0
    for taus in itertools.product([1, -1], repeat=4):
        w = 1.0
        for t in taus:
            w *= p_up if t == 1 else (1 - p_up)
        total += w * math.tanh(params.beta_j * sum(taus))
    assert bethe.local_mean_field(params, m) == pytest.approx(total, abs=1e-14)


def test_local_mean_field_degree_cap():
    with pytest.raises(CapabilityError):
        bethe.local_mean_field(bethe.BetheParams(0.5, 1.0, 25), 0.1)


def test_full_magnetization_consistency():
    params = bethe.BetheParams(0.6, 1.0, 4)
    m_c = bethe.cavity_fixed_point(params).value
    m = bethe.full_magnetization(params, m_c)
    # full value uses one extra branch, so it exceeds the cavity value
    assert m > m_c > 0


def test_link_energy_limits():
    z = 4
    # infinite temperature: independent spins, E = tanh(0) = 0
    assert bethe.link_energy(bethe.BetheParams(0.0, 1.0, z), 0.0) == 0.0
    # deep ferromagnet: aligned spins, E -> 1
    params = bethe.BetheParams(5.0, 1.0, z)
    m_c = bethe.cavity_fixed_point(params).value
    assert bethe.link_energy(params, m_c) == pytest.approx(1.0, abs=1e-3)


def test_link_energy_paramagnetic_value():
    # with m_C = 0 the link energy reduces to tanh(beta J)
    params = bethe.BetheParams(0.25, 1.0, 4)
    assert bethe.link_energy(params, 0.0) == pytest.approx(
        math.tanh(0.25), abs=1e-14)


def test_bifurcation_z4():
    found = bethe.first_unstable_beta_j(4)
    assert found == pytest.approx(math.atanh(1.0 / 3.0), abs=1e-3)


def test_bifurcation_z3():
    # instability of m=0 at (z-1) tanh(bJ) = 1
    found = bethe.first_unstable_beta_j(3)
    assert found == pytest.approx(math.atanh(0.5), abs=1e-3)


def test_bifurcation_bracket_validation():
    with pytest.raises(ValueError):
        bethe.first_unstable_beta_j(4, lo=0.5, hi=1.0)  # already unstable at lo
    with pytest.raises(ValueError):
        bethe.first_unstable_beta_j(4, lo=0.0, hi=0.1)  # still stable at hi


def test_iteration_limit_carries_state():
    params = bethe.BetheParams(0.5, 1.0, 4)
    with pytest.raises(IterationLimitError) as err:
        bethe.cavity_fixed_point(params, max_iter=3)
    assert err.value.iterations == 3
    assert -1.0 <= err.value.last_value <= 1.0


def test_params_validation():
    with pytest.raises(ValueError):
        bethe.BetheParams(-0.1, 1.0, 4)
    with pytest.raises(ValueError):
        bethe.BetheParams(0.5, 1.0, 0)
    with pytest.raises(ValueError):
        bethe.cavity_fixed_point(bethe.BetheParams(0.5, 1.0, 4), init=1.5)
    with pytest.raises(ValueError):
        bethe.cavity_fixed_point(bethe.BetheParams(0.5, 1.0, 4), damping=1.0)


def test_report_residual_satisfies_equation():
    params = bethe.BetheParams(0.8, 1.0, 5)
    rep = bethe.cavity_fixed_point(params)
    t = math.tanh(params.beta_j)
    resid = abs(math.tanh(4 * math.atanh(t * rep.value)) - rep.value)
    assert resid < 10 * bethe.DEFAULT_TOL
