"""Rate-1/2 inner code for slot payloads: first-order Reed-Muller RM(1,3).

16 codewords of length 8, minimum distance 4, encoding 4 information bits
per block. Decoding is soft maximum likelihood, a correlation against all
16 BPSK codewords, which is cheap at this size.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

BLOCK_INFO_BITS = 4
BLOCK_CODE_BITS = 8


def _build_codebook() -> np.ndarray:
    # codeword bit j of message (u0,u1,u2,u3): u0 + u1*b1 + u2*b2 + u3*b3 mod 2,
    # with (b1,b2,b3) the bits of the position j
    cw = np.zeros((16, 8), dtype=np.int8)
    for u in range(16):
        u0, u1, u2, u3 = (u >> 3) & 1, (u >> 2) & 1, (u >> 1) & 1, u & 1
        for j in range(8):
            b1, b2, b3 = (j >> 2) & 1, (j >> 1) & 1, j & 1
            cw[u, j] = (u0 + u1 * b1 + u2 * b2 + u3 * b3) % 2
    return cw


CODEWORDS = _build_codebook()
BPSK_CODEWORDS = 1.0 - 2.0 * CODEWORDS  # bit b -> (-1)^b


def rm_encode(bits) -> np.ndarray:
    """Encode a bit vector (length a multiple of 4, MSB of each block
    first) into the concatenated length-8 codewords."""
    bits = np.asarray(bits, dtype=np.int8)
    if bits.ndim != 1 or bits.size % BLOCK_INFO_BITS:
        raise ConfigError(f"bit count must be a multiple of {BLOCK_INFO_BITS}, got shape {bits.shape}")
    if np.any((bits != 0) & (bits != 1)):
        raise ConfigError("bits must be 0/1")
    blocks = bits.reshape(-1, BLOCK_INFO_BITS)
    idx = blocks @ np.array([8, 4, 2, 1], dtype=np.int64)
    return CODEWORDS[idx].reshape(-1)


def rm_decode(samples) -> tuple[np.ndarray, float]:
    """Soft-ML decode of concatenated blocks: per block, the codeword with
    the highest correlation (ties to the lowest message index).

    Returns (bits, metric) with metric the summed winning correlations;
    equal-energy codewords make this the exact ML rule in white noise at
    any noise level.
    """
    s = np.asarray(samples, dtype=float)
    if s.ndim != 1 or s.size % BLOCK_CODE_BITS:
        raise ConfigError(f"sample count must be a multiple of {BLOCK_CODE_BITS}, got shape {s.shape}")
    blocks = s.reshape(-1, BLOCK_CODE_BITS)
    corr = blocks @ BPSK_CODEWORDS.T
    best = np.argmax(corr, axis=1)  # first max, deterministic tie-break
    metric = float(corr[np.arange(best.size), best].sum())
    bits = ((best[:, None] >> np.array([3, 2, 1, 0])) & 1).astype(np.int8).reshape(-1)
    return bits, metric
