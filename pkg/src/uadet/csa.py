"""Slotted detector: replica placement, the contention graph, and its
decoders.

An active user draws a replica count from the degree distribution, places
copies of its slot payload (its own id, optionally FEC coded) in that many
distinct slots, and the receiver resolves users from singleton slots,
subtracting each resolved user's replicas and looking for new singletons.
The noiseless decoder works purely on the graph; the noisy one works on
the waveform and re-derives replica positions from decoded ids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import ConfigError
from .model import substream
from .rm import BLOCK_CODE_BITS, BLOCK_INFO_BITS, rm_decode, rm_encode

_PLACEMENT_TAG = "replica-placement"


@dataclass(frozen=True)
class DegreeDistribution:
    """Replica-count distribution Lambda as ((degree, probability), ...).

    Degrees are distinct positive ints; probabilities must sum to 1.
    Zero-probability terms are dropped and terms are kept sorted by degree
    so equal distributions compare equal.
    """

    terms: tuple[tuple[int, float], ...]

    def __post_init__(self):
        cleaned = []
        for d, p in self.terms:
            if int(d) != d or d < 1:
                raise ConfigError(f"degrees must be positive integers, got {d}")
            if p < 0:
                raise ConfigError(f"probabilities must be >= 0, got {p}")
            if p > 0:
                cleaned.append((int(d), float(p)))
        if not cleaned:
            raise ConfigError("degree distribution has no positive-probability term")
        cleaned.sort()
        degs = [d for d, _ in cleaned]
        if len(set(degs)) != len(degs):
            raise ConfigError(f"duplicate degrees in {degs}")
        total = math.fsum(p for _, p in cleaned)
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"probabilities sum to {total}, expected 1")
        object.__setattr__(self, "terms", tuple(cleaned))

    @classmethod
    def from_mapping(cls, mapping) -> "DegreeDistribution":
        return cls(tuple((int(d), float(p)) for d, p in mapping.items()))

    @classmethod
    def from_string(cls, text: str) -> "DegreeDistribution":
        """Parse "2:0.25,3:0.6,8:0.15"."""
        terms = []
        for part in text.split(","):
            try:
                d, p = part.split(":")
                terms.append((int(d), float(p)))
            except ValueError:
                raise ConfigError(f"cannot parse degree term {part!r}") from None
        return cls(tuple(terms))

    @cached_property
    def mean(self) -> float:
        """Average replica count."""
        return math.fsum(d * p for d, p in self.terms)

    @property
    def max_degree(self) -> int:
        return self.terms[-1][0]

    def edge_coefficients(self) -> tuple[tuple[int, float], ...]:
        """Edge-perspective coefficients lambda_d = d Lambda_d / mean."""
        mb = self.mean
        return tuple((d, d * p / mb) for d, p in self.terms)

    def node_poly(self, x: float) -> float:
        """Lambda(x) = sum_d Lambda_d x^d."""
        return math.fsum(p * x ** d for d, p in self.terms)

    def edge_poly(self, x: float) -> float:
        """lambda(x) = sum_d lambda_d x^(d-1)."""
        return math.fsum(c * x ** (d - 1) for d, c in self.edge_coefficients())

    def sample(self, rng: np.random.Generator, size: int | None = None):
        degs = np.array([d for d, _ in self.terms])
        probs = np.array([p for _, p in self.terms])
        out = rng.choice(degs, size=size, p=probs)
        return int(out) if size is None else out


DEFAULT_DISTRIBUTION = DegreeDistribution(((2, 0.25), (3, 0.6), (8, 0.15)))


def replica_slots(user_id: int, frame_seed: int, dist: DegreeDistribution,
                  M: int) -> tuple[int, ...]:
    """Pseudorandom replica placement for one user in one frame.

    Keyed by (frame_seed, user_id) only, so the receiver can re-derive a
    decoded user's slots without side information. Draws the degree first,
    then that many distinct slots. Returned sorted.
    """
    if dist.max_degree > M:
        raise ConfigError(f"max degree {dist.max_degree} exceeds M={M} slots")
    rng = substream(frame_seed, _PLACEMENT_TAG, user_id)
    d = dist.sample(rng)
    slots = rng.choice(M, size=d, replace=False)
    return tuple(sorted(int(s) for s in slots))


@dataclass(frozen=True)
class FrameGraph:
    """Bipartite contention graph of one frame: users vs the M slots."""

    M: int
    placements: tuple[tuple[int, tuple[int, ...]], ...]  # (user_id, its slots)

    def slot_counts(self) -> list[int]:
        """Replica count per slot (the genie multiplicity)."""
        counts = [0] * self.M
        for _, slots in self.placements:
            for s in slots:
                counts[s] += 1
        return counts

    def degrees(self) -> list[int]:
        return [len(slots) for _, slots in self.placements]

    def adjacency(self) -> np.ndarray:
        """M x n_users 0/1 matrix, column order follows placements."""
        a = np.zeros((self.M, len(self.placements)), dtype=np.int8)
        for j, (_, slots) in enumerate(self.placements):
            a[list(slots), j] = 1
        return a


def build_frame(M: int, dist: DegreeDistribution, active: Iterable[int],
                frame_seed: int) -> FrameGraph:
    """Place every active user via its replica_slots stream."""
    users = sorted(int(u) for u in active)
    return FrameGraph(M, tuple((u, replica_slots(u, frame_seed, dist, M)) for u in users))


@dataclass(frozen=True)
class CsaDecodeResult:
    """decoded_ids is the estimated active set; trace records (slot, user)
    resolution steps in order; unresolved_edges counts replica copies still
    unexplained when decoding stalls; discarded_slots lists singleton slots
    the noisy receiver gave up on."""

    decoded_ids: frozenset[int]
    trace: tuple[tuple[int, int], ...]
    unresolved_edges: int
    discarded_slots: tuple[int, ...] = ()


def peel_decode(graph: FrameGraph,
                selection_rng: np.random.Generator | None = None) -> CsaDecodeResult:
    """Iterative singleton resolution on the contention graph.

    Scans slots lowest index first by default, which fixes the trace; pass
    selection_rng to pick uniformly among current singletons instead. The
    decoded set is the same either way (the process is confluent), only
    the trace order changes.
    """
    user_slots = dict(graph.placements)
    if len(user_slots) != len(graph.placements):
        raise ConfigError("duplicate user id in frame graph")
    slot_users: list[set[int]] = [set() for _ in range(graph.M)]
    for u, slots in graph.placements:
        for s in slots:
            if not 0 <= s < graph.M:
                raise ConfigError(f"slot {s} outside 0..{graph.M - 1}")
            slot_users[s].add(u)

    decoded: list[int] = []
    trace: list[tuple[int, int]] = []
    while True:
        singles = [s for s in range(graph.M) if len(slot_users[s]) == 1]
        if not singles:
            break
        s = singles[0] if selection_rng is None else singles[int(selection_rng.integers(len(singles)))]
        (u,) = slot_users[s]
        decoded.append(u)
        trace.append((s, u))
        for s2 in user_slots[u]:
            slot_users[s2].discard(u)
    unresolved = sum(len(s) for s in slot_users)
    return CsaDecodeResult(frozenset(decoded), tuple(trace), unresolved)


# --- waveform level ----------------------------------------------------------

@dataclass(frozen=True)
class IdCodec:
    """Maps a user id to the real-valued payload block sent in each of its
    replica slots.

    Plain mode sends the id's bits as raw BPSK, one symbol per bit. Coded
    mode zero-pads the id to a multiple of 4 bits and applies the rate-1/2
    inner code, doubling the symbol count; the receiver rejects blocks
    whose pad bits decode nonzero or whose id is out of range.
    """

    n_users: int
    coded: bool = False

    def __post_init__(self):
        if self.n_users < 1:
            raise ConfigError(f"n_users must be positive, got {self.n_users}")

    @property
    def id_bits(self) -> int:
        return max(1, (self.n_users - 1).bit_length())

    @property
    def padded_bits(self) -> int:
        if not self.coded:
            return self.id_bits
        return -(-self.id_bits // BLOCK_INFO_BITS) * BLOCK_INFO_BITS

    @property
    def slot_symbols(self) -> int:
        """T_S implied by the payload: id_bits plain, 2 * padded_bits coded."""
        if not self.coded:
            return self.id_bits
        return self.padded_bits // BLOCK_INFO_BITS * BLOCK_CODE_BITS

    def id_to_bits(self, user_id: int) -> np.ndarray:
        if not 0 <= user_id < self.n_users:
            raise ConfigError(f"user id {user_id} outside 0..{self.n_users - 1}")
        ls = self.id_bits
        bits = np.zeros(self.padded_bits, dtype=np.int8)
        for i in range(ls):
            bits[i] = (user_id >> (ls - 1 - i)) & 1
        return bits

    def encode(self, user_id: int) -> np.ndarray:
        """Unit-level +-1 payload block of length slot_symbols."""
        bits = self.id_to_bits(user_id)
        if self.coded:
            bits = rm_encode(bits)
        return 1.0 - 2.0 * bits.astype(float)

    def decode(self, samples: np.ndarray) -> tuple[int | None, float]:
        """Hard decision (plain) or soft-ML inner decode (coded) of one
        payload block. Returns (user_id, correlation metric); user_id is
        None when the block fails validity checks."""
        s = np.asarray(samples, dtype=float)
        if s.shape != (self.slot_symbols,):
            raise ConfigError(f"payload has shape {s.shape}, expected ({self.slot_symbols},)")
        if self.coded:
            bits, metric = rm_decode(s)
        else:
            bits = (s < 0).astype(np.int8)
            metric = float(np.abs(s).sum())
        ls = self.id_bits
        uid = 0
        for b in bits[:ls]:
            uid = (uid << 1) | int(b)
        if np.any(bits[ls:]):
            return None, metric
        if uid >= self.n_users:
            return None, metric
        return uid, metric


def build_csa_codeword(user_id: int, slots: Iterable[int], codec: IdCodec,
                       M: int, amplitude: float = 1.0) -> np.ndarray:
    """Frame waveform of one user: its payload block, scaled, in each of
    its replica slots, zero elsewhere. Length M * codec.slot_symbols."""
    T = codec.slot_symbols
    x = np.zeros(M * T)
    block = amplitude * codec.encode(user_id)
    for s in slots:
        if not 0 <= s < M:
            raise ConfigError(f"slot {s} outside 0..{M - 1}")
        x[s * T:(s + 1) * T] = block
    return x


def csa_receive_noisy(y: np.ndarray, codec: IdCodec, dist: DegreeDistribution,
                      M: int, frame_seed: int, slot_counts: Iterable[int],
                      amplitude: float) -> CsaDecodeResult:
    """Waveform-level successive interference cancellation.

    slot_counts is the genie-provided replica count per slot; the receiver
    trusts it to locate singleton slots but decodes ids from the waveform.
    Each round takes the lowest-index open singleton slot, decodes its
    payload, re-derives the replica set from (decoded id, frame_seed),
    checks consistency, and subtracts the reconstructed codeword at the
    known amplitude. Inconsistent slots are discarded and never revisited;
    a wrongly decoded id stays subtracted, which is how false alarms and
    residual interference arise. With a zero-noise waveform this reduces
    exactly to peel_decode.
    """
    T = codec.slot_symbols
    y = np.array(y, dtype=float)
    if y.shape != (M * T,):
        raise ConfigError(f"frame has shape {y.shape}, expected ({M * T},)")
    counts = [int(c) for c in slot_counts]
    if len(counts) != M:
        raise ConfigError(f"got {len(counts)} slot counts for M={M}")

    closed = [False] * M
    decoded: list[int] = []
    decoded_set: set[int] = set()
    trace: list[tuple[int, int]] = []
    discarded: list[int] = []
    while True:
        s = next((i for i in range(M) if counts[i] == 1 and not closed[i]), None)
        if s is None:
            break
        uid, _ = codec.decode(y[s * T:(s + 1) * T])
        slots: tuple[int, ...] | None = None
        if uid is not None and uid not in decoded_set:
            slots = replica_slots(uid, frame_seed, dist, M)
            if s not in slots:
                slots = None
        if slots is None:
            closed[s] = True
            discarded.append(s)
            continue
        y -= build_csa_codeword(uid, slots, codec, M, amplitude)
        for s2 in slots:
            counts[s2] -= 1
        decoded.append(uid)
        decoded_set.add(uid)
        trace.append((s, uid))

    unresolved = sum(c for c in counts if c > 0)
    return CsaDecodeResult(frozenset(decoded), tuple(trace), unresolved, tuple(discarded))
