"""Mean-field and cavity fixed points for the Ising ferromagnet on trees.

Three closures of increasing quality for a degree-z lattice with coupling J
at inverse temperature beta:

* naive mean field       m = tanh(beta*J*z*m)
* local mean field       m0 = E_tau[ tanh(beta*J * sum_i tau_i) ],
                         tau_i = +/-1 iid with mean m
* cavity recursion       m_C = tanh((z-1) * artanh(tanh(beta*J) * m_C))

The cavity value feeds the full magnetization and the per-link energy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, IterationLimitError

__all__ = [
    "BetheParams",
    "FixedPointReport",
    "naive_mean_field",
    "local_mean_field",
    "cavity_fixed_point",
    "full_magnetization",
    "link_energy",
    "first_unstable_beta_j",
]

DEFAULT_TOL = 1e-12
DEFAULT_DAMPING = 0.5
DEFAULT_MAX_ITER = 100_000

LOCAL_FIELD_MAX_Z = 24


@dataclass(frozen=True)
class BetheParams:
    """Inverse temperature, coupling, and lattice degree."""
    beta: float
    j_coupling: float
    z: int

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.z < 1:
            raise ValueError("z must be >= 1")

    @property
    def beta_j(self) -> float:
        return self.beta * self.j_coupling


@dataclass(frozen=True)
class FixedPointReport:
    """Converged value, iterations used, and the final update size."""
    value: float
    iterations: int
    residual: float


def _newton_polish(f, x, lo, hi, steps=3):
    """A few guarded Newton steps on g(m) = f(m) - m from a converged point.

    On nearly flat maps (|f'-1| small) a residual below tol still allows a
    value error of tol/|f'-1|; Newton with a secant slope over a separated
    interval removes that amplification. Each step is kept only if it
    strictly shrinks the residual, so polishing can only improve the point.
    """
    resid = abs(f(x) - x)
    for _ in range(steps):
        h = 1e-6 * max(1.0, abs(x))
        x1 = x + h if x + h <= hi else x - h
        g0 = f(x) - x
        g1 = f(x1) - x1
        slope = (g1 - g0) / (x1 - x)
        if not np.isfinite(slope) or abs(slope) < 4.0 * np.finfo(float).eps:
            break
        cand = min(hi, max(lo, x - g0 / slope))
        cand_resid = abs(f(cand) - cand)
        if cand_resid >= resid:
            break
        x, resid = cand, cand_resid
    return x, resid


def _damped_fixed_point(f, init, tol, damping, max_iter, lo=-1.0, hi=1.0):
    """Damped iteration m <- damping*m + (1-damping)*f(m).

    Stops when the update falls below tol. Slow geometric tails (contraction
    rate arbitrarily close to 1) are handled by Aitken extrapolation over
    checkpoints spaced `probe` iterations apart: wide spacing keeps the
    second difference of checkpoint values above float noise even when
    consecutive updates shrink by parts in 1e9. An extrapolated candidate is
    returned only if it satisfies the fixed-point equation to tol, so
    acceleration can never invent a wrong answer; a candidate that merely
    improves the residual restarts the iteration from there (Steffensen
    style). Checkpoint spacing doubles when an attempt was unreadable or
    useless, and every accepted value gets a Newton polish to remove the
    value-error amplification of nearly flat maps.
    """
    if not lo <= init <= hi:
        raise ValueError(f"init must lie in [{lo}, {hi}]")
    if not 0.0 <= damping < 1.0:
        raise ValueError("damping must lie in [0, 1)")
    eps = float(np.finfo(float).eps)
    m = float(init)
    it = 0
    probe = 256
    marks = [m]
    since = 0
    while it < max_iter:
        new = damping * m + (1.0 - damping) * f(m)
        it += 1
        delta = new - m
        m = new
        if abs(delta) <= tol:
            value, resid = _newton_polish(f, m, lo, hi)
            return FixedPointReport(value=value, iterations=it, residual=resid)
        since += 1
        if since < probe:
            continue
        since = 0
        marks.append(m)
        if len(marks) < 3:
            continue
        c0, c1, c2 = marks
        d1, d2 = c1 - c0, c2 - c1
        denom = d2 - d1
        # second difference below float noise means the ratio is unreadable
        trust = 64.0 * eps * max(1.0, abs(c2))
        helped = False
        if abs(denom) > trust and d1 != 0.0 and 0.0 < d2 / d1 < 1.0:
            cand = min(hi, max(lo, c2 - d2 * d2 / denom))
            resid = abs(f(cand) - cand)
            if resid <= tol:
                value, resid = _newton_polish(f, cand, lo, hi)
                return FixedPointReport(value=value, iterations=it,
                                        residual=resid)
            if resid < abs(f(c2) - c2):
                m = cand
                helped = True
        marks = [m]
        if not helped:
            probe = min(probe * 2, max(256, (max_iter - it) // 2))
    raise IterationLimitError(
        f"no fixed point within {max_iter} iterations (last value {m})",
        last_value=m, iterations=max_iter)


def naive_mean_field(params: BetheParams, init: float = 0.9,
                     tol: float = DEFAULT_TOL, damping: float = DEFAULT_DAMPING,
                     max_iter: int = DEFAULT_MAX_ITER) -> FixedPointReport:
    """Solve m = tanh(beta*J*z*m); positive init lands on the m >= 0 branch."""
    c = params.beta_j * params.z

    def f(m):
        return math.tanh(c * m)

    return _damped_fixed_point(f, init, tol, damping, max_iter)


def local_mean_field(params: BetheParams, m: float) -> float:
    """One application of the local closure at neighbor magnetization m.

    Averages tanh(beta*J*(tau_1+...+tau_z)) over z iid spins with mean m.
    The 2^z spin configurations collapse onto the number of up spins, so
    the sum runs over binomial weights; identical value, z stays bounded.
    """
    if not -1.0 <= m <= 1.0:
        raise ValueError("m must lie in [-1, 1]")
    z = params.z
    if z > LOCAL_FIELD_MAX_Z:
        raise CapabilityError(f"local_mean_field supports z <= {LOCAL_FIELD_MAX_Z}")
    p_up = 0.5 * (1.0 + m)
    total = 0.0
    for k in range(z + 1):
        w = math.comb(z, k) * p_up**k * (1.0 - p_up)**(z - k)
        total += w * math.tanh(params.beta_j * (2 * k - z))
    return total


def cavity_fixed_point(params: BetheParams, init: float = 0.9,
                       tol: float = DEFAULT_TOL, damping: float = DEFAULT_DAMPING,
                       max_iter: int = DEFAULT_MAX_ITER) -> FixedPointReport:
    """Solve m_C = tanh((z-1) * artanh(tanh(beta*J) * m_C))."""
    t = math.tanh(params.beta_j)
    k = params.z - 1

    def f(m):
        return math.tanh(k * math.atanh(t * m))

    return _damped_fixed_point(f, init, tol, damping, max_iter)


def full_magnetization(params: BetheParams, m_cavity: float) -> float:
    """Node magnetization from a converged cavity value: all z branches."""
    if not -1.0 <= m_cavity <= 1.0:
        raise ValueError("m_cavity must lie in [-1, 1]")
    t = math.tanh(params.beta_j)
    return math.tanh(params.z * math.atanh(t * m_cavity))


def link_energy(params: BetheParams, m_cavity: float) -> float:
    """Per-link energy (tanh(beta*J) + m_C^2) / (1 + tanh(beta*J) * m_C^2)."""
    if not -1.0 <= m_cavity <= 1.0:
        raise ValueError("m_cavity must lie in [-1, 1]")
    t = math.tanh(params.beta_j)
    return (t + m_cavity**2) / (1.0 + t * m_cavity**2)


def first_unstable_beta_j(z: int, lo: float = 0.0, hi: float = 1.0,
                          resolution: float = 1e-4, m_threshold: float = 1e-4,
                          init: float = 0.5) -> float:
    """Smallest beta*J in [lo, hi] where the cavity recursion leaves m_C = 0.

    Bisection on the indicator |m_C| > m_threshold; returns the bracket
    midpoint once the bracket is narrower than resolution. Raises if the
    recursion is already unstable at lo or still stable at hi.
    """
    def is_on(bj):
        params = BetheParams(beta=bj, j_coupling=1.0, z=z)
        return abs(cavity_fixed_point(params, init=init).value) > m_threshold

    if is_on(lo):
        raise ValueError("already nonzero at the lower end of the bracket")
    if not is_on(hi):
        raise ValueError("still zero at the upper end of the bracket")
    a, b = lo, hi
    while b - a > resolution:
        mid = 0.5 * (a + b)
        if is_on(mid):
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)
