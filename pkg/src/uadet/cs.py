"""Unslotted detector: dense binary codebooks and greedy support recovery.

Each user gets a random column of +-1/sqrt(m), all k active users transmit
simultaneously, and the receiver recovers the active set with orthogonal
matching pursuit. Includes the closed-form sample-size bounds and the
noisy-case stopping rule and amplitude condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConditionNotMet, ConfigError
from .model import SystemConfig

# noiseless stop: residual is "zero" once below this fraction of ||y||
NOISELESS_RTOL = 1e-9


@dataclass(frozen=True)
class DenseCodebook:
    """m x N matrix whose columns are the per-user signature waveforms."""

    matrix: np.ndarray

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def N(self) -> int:
        return self.matrix.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.matrix[:, j]


def gen_bernoulli_codebook(cfg: SystemConfig, rng: np.random.Generator) -> DenseCodebook:
    """Equiprobable +-1/sqrt(m) entries, so every column has unit norm."""
    signs = rng.integers(0, 2, size=(cfg.m, cfg.N)) * 2 - 1
    return DenseCodebook(signs / math.sqrt(cfg.m))


def coherence(cb: DenseCodebook) -> float:
    """Largest |<a_i, a_j>| over distinct column pairs."""
    if cb.N < 2:
        raise ConfigError("coherence needs at least two columns")
    g = cb.matrix.T @ cb.matrix
    np.fill_diagonal(g, 0.0)
    return float(np.max(np.abs(g)))


# --- stopping rules ---------------------------------------------------------

@dataclass(frozen=True)
class ResidualBelow:
    """Stop once ||r|| <= epsilon (absolute)."""

    epsilon: float


@dataclass(frozen=True)
class MaxIterations:
    """Stop after exactly count selections (earlier if the residual hits
    the noiseless floor)."""

    count: int


@dataclass(frozen=True)
class NoiseAdaptiveStop:
    """Stop once ||r|| <= sigma * sqrt(m + sqrt(m ln m)), the level below
    which the residual is indistinguishable from pure noise."""

    sigma: float


StoppingRule = ResidualBelow | MaxIterations | NoiseAdaptiveStop | None


def noise_floor_threshold(sigma: float, m: int) -> float:
    """sigma * sqrt(m + sqrt(m ln m)), natural log.

    With high probability the norm of an m-dimensional N(0, sigma^2)
    vector stays below this, so a residual under it carries no more
    recoverable users.
    """
    if m < 1:
        raise ConfigError(f"m must be >= 1, got {m}")
    if sigma < 0:
        raise ConfigError(f"sigma must be >= 0, got {sigma}")
    return sigma * math.sqrt(m + math.sqrt(m * math.log(m)))


def recoverable_amplitude(sigma: float, m: int, k: int, mu: float) -> float:
    """Smallest per-user amplitude the noise-adaptive stop is guaranteed to
    recover: 2 * noise_floor / (1 - (2k-1) mu).

    Requires mu < 1/(2k-1); above that the k-set is not identifiable from
    coherence alone and ConditionNotMet is raised.
    """
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if mu < 0:
        raise ConfigError(f"mu must be >= 0, got {mu}")
    if mu >= 1.0 / (2 * k - 1):
        raise ConditionNotMet(
            f"coherence {mu} >= 1/(2k-1) = {1.0 / (2 * k - 1)}; no guarantee at k={k}")
    denom = 1.0 - (2 * k - 1) * mu
    return 2.0 * noise_floor_threshold(sigma, m) / denom


# --- sample-size bounds -----------------------------------------------------

def required_m_bound(N: int, k: int, delta: float, constant_c: float = 4.0) -> int:
    """ceil(C k ln(N/delta)): symbols sufficient for exact recovery with
    probability at least 1 - delta. delta must lie in (0, 0.36)."""
    if N < 1 or k < 0 or k > N:
        raise ConfigError(f"need N >= 1 and 0 <= k <= N, got N={N}, k={k}")
    if not 0.0 < delta < 0.36:
        raise ConfigError(f"delta must lie in (0, 0.36), got {delta}")
    if constant_c <= 0:
        raise ConfigError(f"constant_c must be positive, got {constant_c}")
    return math.ceil(constant_c * k * math.log(N / delta))


def empirical_m_estimate(N: int, k: int) -> int:
    """ceil(2 k ln N), the sample count that already succeeds almost always
    in simulation (a factor ~2 below the provable bound)."""
    if N < 2 or k < 0:
        raise ConfigError(f"need N >= 2 and k >= 0, got N={N}, k={k}")
    return math.ceil(2.0 * k * math.log(N))


# --- orthogonal matching pursuit --------------------------------------------

@dataclass(frozen=True)
class OmpResult:
    """support is the estimated active set, in selection order.

    coefficients are the final least-squares amplitudes on the support.
    hit_iteration_cap flags runs cut off at min(m, N) selections with the
    stopping rule still unsatisfied.
    """

    support: tuple[int, ...]
    coefficients: np.ndarray = field(repr=False)
    final_residual_norm: float
    iterations: int
    hit_iteration_cap: bool = False


def omp(y: np.ndarray, cb: DenseCodebook, stop: StoppingRule = None) -> OmpResult:
    """Greedy recovery: pick the column most correlated with the residual,
    least-squares refit over the picked set, repeat until the stopping rule
    fires.

    stop=None uses the noiseless rule ||r|| <= NOISELESS_RTOL * ||y||.
    Correlation ties break to the lowest column index. A rank-deficient
    selection is handled by the minimum-norm least-squares fit. Selections
    are hard-capped at min(m, N).
    """
    A = cb.matrix
    m, N = A.shape
    y = np.asarray(y, dtype=float)
    if y.shape != (m,):
        raise ConfigError(f"y has shape {y.shape}, expected ({m},)")
    ynorm = float(np.linalg.norm(y))

    cap = min(m, N)
    if stop is None:
        threshold, max_iter = NOISELESS_RTOL * ynorm, cap
    elif isinstance(stop, ResidualBelow):
        threshold, max_iter = stop.epsilon, cap
    elif isinstance(stop, NoiseAdaptiveStop):
        threshold, max_iter = noise_floor_threshold(stop.sigma, m), cap
    elif isinstance(stop, MaxIterations):
        if stop.count < 0:
            raise ConfigError(f"iteration count must be >= 0, got {stop.count}")
        threshold, max_iter = NOISELESS_RTOL * ynorm, min(stop.count, cap)
    else:
        raise ConfigError(f"unknown stopping rule {stop!r}")

    support: list[int] = []
    coef = np.zeros(0)
    r = y
    iterations = 0
    capped = False
    while True:
        rnorm = float(np.linalg.norm(r))
        if rnorm <= threshold:
            break
        if iterations >= max_iter:
            capped = iterations >= cap
            break
        corr = np.abs(A.T @ r)
        j = int(np.argmax(corr))  # first occurrence, so lowest index on ties
        if corr[j] <= 1e-12 * max(rnorm, 1.0):
            break  # residual orthogonal to every column; no progress possible
        support.append(j)
        sub = A[:, support]
        coef, *_ = np.linalg.lstsq(sub, y, rcond=None)
        r = y - sub @ coef
        iterations += 1

    return OmpResult(tuple(support), coef, float(np.linalg.norm(r)), iterations, capped)
