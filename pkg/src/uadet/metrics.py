"""Detection metrics: per-trial confusion counts and their aggregation.

Counts are kept as exact integers per trial; rates are formed only at
aggregation time, with fsum so the result is independent of trial order
(and therefore of how trials were scheduled across workers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConfigError

Z_95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class TrialMetrics:
    """Confusion counts of one frame.

    missed: active users not detected; false_alarms: inactive users
    declared active. n_active/n_inactive fix the denominators.
    symbols_sent counts transmitted symbols over all active users;
    energy_sent the corresponding summed squared sample values.
    """

    missed: int
    false_alarms: int
    n_active: int
    n_inactive: int
    symbols_sent: int
    energy_sent: float

    def __post_init__(self):
        if not 0 <= self.missed <= self.n_active:
            raise ConfigError(f"missed={self.missed} outside 0..{self.n_active}")
        if not 0 <= self.false_alarms <= self.n_inactive:
            raise ConfigError(f"false_alarms={self.false_alarms} outside 0..{self.n_inactive}")

    @property
    def exact_support(self) -> bool:
        return self.missed == 0 and self.false_alarms == 0


def score_trial(true_support: Iterable[int], estimated: Iterable[int], N: int,
                symbols_sent: int = 0, energy_sent: float = 0.0) -> TrialMetrics:
    """Compare the estimated active set against the truth."""
    t, e = set(true_support), set(estimated)
    for s in (t, e):
        if s and (min(s) < 0 or max(s) >= N):
            raise ConfigError(f"user id outside 0..{N - 1}")
    k = len(t)
    return TrialMetrics(
        missed=len(t - e),
        false_alarms=len(e - t),
        n_active=k,
        n_inactive=N - k,
        symbols_sent=symbols_sent,
        energy_sent=energy_sent,
    )


@dataclass(frozen=True)
class AggregateMetrics:
    """Rates over a batch of trials.

    mdr is missed detections over all active-user opportunities, far false
    alarms over all inactive-user opportunities, flr the fraction of trials
    whose support was not exactly recovered. plr is an alias of mdr (a
    missed user is an unresolved packet). The *_ci fields are 95% normal
    half-widths, informational only. Per-user symbol and energy figures
    are averaged over active users.
    """

    trials: int
    mdr: float
    far: float
    flr: float
    mdr_ci: float
    far_ci: float
    flr_ci: float
    symbols_per_user: float
    energy_per_user: float

    @property
    def plr(self) -> float:
        return self.mdr


def _rate(count: int, denom: int) -> float:
    return count / denom if denom else 0.0


def _wald_ci(rate: float, denom: int) -> float:
    if denom == 0:
        return 0.0
    return Z_95 * math.sqrt(rate * (1.0 - rate) / denom)


def aggregate(trials: Sequence[TrialMetrics]) -> AggregateMetrics:
    """Pool per-trial counts into rates.

    All trials must share the same (n_active, n_inactive); mixing
    configurations in one aggregate would make the rates meaningless.
    Sums over trials use exact integer arithmetic and fsum, so any
    reordering of the same trials gives bit-identical output.
    """
    if not trials:
        raise ConfigError("cannot aggregate zero trials")
    k, ninact = trials[0].n_active, trials[0].n_inactive
    for t in trials:
        if (t.n_active, t.n_inactive) != (k, ninact):
            raise ConfigError("trials mix different (n_active, n_inactive) shapes")
    n = len(trials)
    missed = sum(t.missed for t in trials)
    fa = sum(t.false_alarms for t in trials)
    failures = sum(1 for t in trials if not t.exact_support)
    symbols = sum(t.symbols_sent for t in trials)
    energy = math.fsum(t.energy_sent for t in trials)

    mdr = _rate(missed, n * k)
    far = _rate(fa, n * ninact)
    flr = _rate(failures, n)
    return AggregateMetrics(
        trials=n,
        mdr=mdr,
        far=far,
        flr=flr,
        mdr_ci=_wald_ci(mdr, n * k),
        far_ci=_wald_ci(far, n * ninact),
        flr_ci=_wald_ci(flr, n),
        symbols_per_user=_rate(symbols, n * k),
        energy_per_user=energy / (n * k) if k else 0.0,
    )


def union_bound_flr(mdr: float, far: float, k: int, n_inactive: int) -> float:
    """k * mdr + n_inactive * far, an upper bound on the frame loss rate
    (capped at 1); useful as a sanity check on aggregates."""
    return min(1.0, k * mdr + n_inactive * far)
