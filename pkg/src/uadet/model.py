"""System model shared by both detectors.

N users, k of them active per frame, a frame of m real symbols that the
slotted framework splits into M slots of T_S = m/M symbols. Activity is a
k-sparse vector, the channel adds white Gaussian noise, and every random
draw comes from a keyed substream so runs are reproducible under any
degree of parallelism.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

CS = "cs"
CSA = "csa"


def _tag(name: str) -> int:
    # stable 64-bit tag for a purpose string; never Python's salted hash()
    return int.from_bytes(hashlib.sha256(name.encode()).digest()[:8], "big")


def substream(*keys: int | str) -> np.random.Generator:
    """Independent generator keyed by e.g. (seed, trial, purpose).

    String keys are hashed with sha256 so the same tuple yields the same
    stream on every platform and run. Integer keys must be non-negative.
    """
    entropy = [k if isinstance(k, int) else _tag(k) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


@dataclass(frozen=True)
class SystemConfig:
    """Frame geometry for one experiment.

    The unslotted framework uses M=1 so the whole frame is one slot of m
    symbols; the slotted one divides m into M equal slots. m must be a
    multiple of M.
    """

    N: int
    k: int
    m: int
    M: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.N < 1:
            raise ConfigError(f"N must be positive, got {self.N}")
        if not 0 <= self.k <= self.N:
            raise ConfigError(f"need 0 <= k <= N, got k={self.k}, N={self.N}")
        if self.m < 1 or self.M < 1:
            raise ConfigError(f"m and M must be positive, got m={self.m}, M={self.M}")
        if self.m % self.M:
            raise ConfigError(f"frame length m={self.m} is not a multiple of M={self.M}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")

    @property
    def slot_symbols(self) -> int:
        """T_S, symbols per slot."""
        return self.m // self.M

    @property
    def id_bits(self) -> int:
        """Bits needed to name any of the N users, at least 1."""
        return max(1, (self.N - 1).bit_length())


@dataclass(frozen=True)
class ActivityVector:
    """Ground truth for one frame: which users transmit, at what level.

    All active users share one amplitude (ideal power control); the dense
    form is the k-sparse vector the unslotted detector tries to recover.
    """

    support: frozenset[int]
    amplitude: float = 1.0

    def dense(self, N: int) -> np.ndarray:
        if self.support and (min(self.support) < 0 or max(self.support) >= N):
            raise ConfigError("support contains ids outside 0..N-1")
        x = np.zeros(N)
        x[sorted(self.support)] = self.amplitude
        return x


def draw_active_set(cfg: SystemConfig, rng: np.random.Generator,
                    amplitude: float = 1.0) -> ActivityVector:
    """Uniformly random k-subset of the N user ids."""
    idx = rng.choice(cfg.N, size=cfg.k, replace=False)
    return ActivityVector(frozenset(int(i) for i in idx), amplitude)


@dataclass(frozen=True)
class Channel:
    """Real AWGN with per-symbol standard deviation noise_std.

    noise_std=0 is the noiseless channel and leaves samples untouched.
    snr_bit_db records the per-information-bit SNR the amplitude was
    derived from, purely for reporting.
    """

    noise_std: float = 0.0
    snr_bit_db: float | None = None

    def __post_init__(self):
        if self.noise_std < 0 or not math.isfinite(self.noise_std):
            raise ConfigError(f"noise_std must be finite and >= 0, got {self.noise_std}")


def apply_channel(clean: np.ndarray, ch: Channel, rng: np.random.Generator) -> np.ndarray:
    if ch.noise_std == 0.0:
        return clean
    return clean + ch.noise_std * rng.standard_normal(clean.shape)


def snr_to_amplitude(snr_bit_db: float, id_bits: int, sigma: float,
                     framework: str, fec_expansion: float = 1.0) -> float:
    """Transmit level that spends 10^(snr/10) * sigma^2 of energy per
    information bit.

    A user's message is its id_bits-bit identity. In the unslotted
    framework the user sends one unit-norm codeword scaled by the returned
    amplitude a, so a^2 = id_bits * sigma^2 * snr_lin. In the slotted
    framework the user sends fec_expansion transmitted symbols per
    information bit (replica count times coded-block expansion), each at
    the returned per-symbol level a_sym, so a_sym^2 = sigma^2 * snr_lin /
    fec_expansion.
    """
    if id_bits < 1:
        raise ConfigError(f"id_bits must be >= 1, got {id_bits}")
    if snr_bit_db == -math.inf:
        return 0.0
    if sigma <= 0:
        raise ConfigError("finite per-bit SNR requires sigma > 0")
    if fec_expansion <= 0:
        raise ConfigError(f"fec_expansion must be positive, got {fec_expansion}")
    snr_lin = 10.0 ** (snr_bit_db / 10.0)
    if framework == CS:
        return sigma * math.sqrt(id_bits * snr_lin)
    if framework == CSA:
        return sigma * math.sqrt(snr_lin / fec_expansion)
    raise ConfigError(f"unknown framework {framework!r}")
