"""Asymptotic tools: the peeling threshold of a degree distribution, the
slot/symbol budgets it implies, and binary-input AWGN capacity.

These give the infinite-frame operating points the finite simulations are
compared against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .csa import DegreeDistribution
from .errors import ConfigError

DE_MAX_ITER = 100_000
DE_P_TOL = 1e-12


@dataclass(frozen=True)
class DeProbe:
    """One density-evolution run: did decoding drive the erasure
    probability to zero at normalized load G = k/M."""

    load: float
    converged: bool
    iterations: int


@dataclass(frozen=True)
class DeResult:
    """g_star is the largest load (within tol) at which peeling still
    resolves everything as M -> infinity; 0.0 means no positive load
    converges."""

    g_star: float
    tol: float
    probes: tuple[DeProbe, ...]


def de_probe(dist: DegreeDistribution, load: float,
             max_iter: int = DE_MAX_ITER, p_tol: float = DE_P_TOL) -> DeProbe:
    """Iterate the slot/user erasure fixed point from p = 1.

    q <- lambda(p) is the chance a replica is still unknown, then
    p <- 1 - exp(-G * mean * q) the chance a slot stays unresolved under
    Poisson slot occupancy. Declares failure early once the per-step
    improvement falls below relative 1e-16 (a positive fixed point)."""
    if load < 0:
        raise ConfigError(f"load must be >= 0, got {load}")
    mean = dist.mean
    p = 1.0
    for it in range(1, max_iter + 1):
        q = dist.edge_poly(p)
        p_next = -math.expm1(-load * mean * q)
        if p_next < p_tol:
            return DeProbe(load, True, it)
        if p - p_next < 1e-16 * p:
            return DeProbe(load, False, it)
        p = p_next
    return DeProbe(load, p < p_tol, max_iter)


def density_evolution_threshold(dist: DegreeDistribution, tol: float = 1e-4,
                                bracket: tuple[float, float] = (0.01, 1.2)) -> DeResult:
    """Bisect the convergence boundary of de_probe over the load bracket.

    Returns g_star accurate to tol. If even the low edge fails (a
    distribution with no peeling slack, e.g. all users sending a single
    replica) g_star is 0.0; if the high edge converges it is returned
    as a lower bound."""
    lo, hi = bracket
    if not 0 < lo < hi:
        raise ConfigError(f"bad bracket {bracket}")
    if tol <= 0:
        raise ConfigError(f"tol must be positive, got {tol}")
    probes = [de_probe(dist, lo)]
    if not probes[0].converged:
        return DeResult(0.0, tol, tuple(probes))
    probes.append(de_probe(dist, hi))
    if probes[-1].converged:
        return DeResult(hi, tol, tuple(probes))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        probe = de_probe(dist, mid)
        probes.append(probe)
        if probe.converged:
            lo = mid
        else:
            hi = mid
    return DeResult(lo, tol, tuple(probes))


def _snap_ceil(x: float) -> int:
    # ceil that forgives float fuzz just below an integer
    r = round(x)
    if abs(x - r) < 1e-9:
        return int(r)
    return math.ceil(x)


def csa_required_slots(k: int, g_star: float) -> int:
    """ceil(k / g_star): slots needed to carry k users at threshold load."""
    if k < 0:
        raise ConfigError(f"k must be >= 0, got {k}")
    if k == 0:
        return 0
    if g_star <= 0:
        raise ConfigError(f"g_star must be positive, got {g_star}")
    return _snap_ceil(k / g_star)


def csa_required_symbols(k: int, g_star: float, slot_symbols: int) -> int:
    """ceil(k * slot_symbols / g_star): total frame symbols at threshold
    load with slot_symbols symbols per slot."""
    if slot_symbols < 1:
        raise ConfigError(f"slot_symbols must be >= 1, got {slot_symbols}")
    if k < 0:
        raise ConfigError(f"k must be >= 0, got {k}")
    if k == 0:
        return 0
    if g_star <= 0:
        raise ConfigError(f"g_star must be positive, got {g_star}")
    return _snap_ceil(k * slot_symbols / g_star)


def biawgn_capacity(sigma: float, nodes: int = 96) -> float:
    """Capacity in bits per channel use of +-1 signaling in N(0, sigma^2)
    noise: 1 - E[log2(1 + exp(-2(1 + sigma Z)/sigma^2))], Z standard
    normal, by Gauss-Hermite quadrature.

    The log term is evaluated via logaddexp so large negative exponents do
    not overflow; nodes=96 puts the quadrature error far below 1e-9."""
    if sigma <= 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    if nodes < 1:
        raise ConfigError(f"nodes must be >= 1, got {nodes}")
    x, w = np.polynomial.hermite.hermgauss(nodes)
    z = math.sqrt(2.0) * x  # E[f(Z)] = sum w_i f(sqrt(2) x_i) / sqrt(pi)
    t = -2.0 * (1.0 + sigma * z) / (sigma * sigma)
    penalty = np.logaddexp(0.0, t) / math.log(2.0)
    c = 1.0 - float(np.sum(w * penalty)) / math.sqrt(math.pi)
    return min(max(c, 0.0), 1.0)


def noisy_csa_required_symbols(k: int, g_star: float, slot_symbols: int,
                               sigma: float) -> int:
    """Symbol budget at threshold load when each slot carries coded
    payloads that must survive noise: the noiseless budget divided by the
    binary-input channel capacity at that noise level."""
    base = csa_required_symbols(k, g_star, slot_symbols)
    if base == 0:
        return 0
    return _snap_ceil(base / biawgn_capacity(sigma))
