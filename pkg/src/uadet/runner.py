"""Monte Carlo orchestration: turn an ExperimentSpec into result rows.

Every trial draws from substreams keyed by (seed, sweep point, trial,
purpose), so a sweep gives the same numbers no matter how trials are
scheduled, including across thread counts.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import cs as cs_mod
from .csa import IdCodec, build_csa_codeword, build_frame, csa_receive_noisy, peel_decode
from .errors import ConfigError
from .experiments import ExperimentSpec, ResultRow
from .metrics import TrialMetrics, aggregate, score_trial
from .model import CS, CSA, Channel, SystemConfig, apply_channel, draw_active_set, snr_to_amplitude, substream

_FRAME_SEED_SPAN = 2 ** 63


def _cs_trial(spec: ExperimentSpec, m: int, t: int, sigma: float,
              amplitude: float, stop) -> TrialMetrics:
    cfg = SystemConfig(N=spec.N, k=spec.k, m=m, M=1, seed=spec.seed)
    act = draw_active_set(cfg, substream(spec.seed, m, t, "activity"), amplitude)
    cb = cs_mod.gen_bernoulli_codebook(cfg, substream(spec.seed, m, t, "codebook"))
    cols = sorted(act.support)
    clean = amplitude * cb.matrix[:, cols].sum(axis=1) if cols else np.zeros(m)
    y = apply_channel(clean, Channel(sigma), substream(spec.seed, m, t, "noise"))
    res = cs_mod.omp(y, cb, stop)
    return score_trial(act.support, res.support, spec.N,
                       symbols_sent=spec.k * m,
                       energy_sent=spec.k * amplitude ** 2)


def _csa_trial(spec: ExperimentSpec, M: int, t: int, sigma: float,
               amplitude: float, codec: IdCodec, dist) -> TrialMetrics:
    T = codec.slot_symbols
    cfg = SystemConfig(N=spec.N, k=spec.k, m=M * T, M=M, seed=spec.seed)
    act = draw_active_set(cfg, substream(spec.seed, M, t, "activity"), amplitude)
    frame_seed = int(substream(spec.seed, M, t, "frame-seed").integers(_FRAME_SEED_SPAN))
    graph = build_frame(M, dist, act.support, frame_seed)
    replicas = sum(graph.degrees())

    if sigma == 0.0:
        res = peel_decode(graph)
    else:
        y = np.zeros(M * T)
        for uid, slots in graph.placements:
            y += build_csa_codeword(uid, slots, codec, M, amplitude)
        y = apply_channel(y, Channel(sigma), substream(spec.seed, M, t, "noise"))
        res = csa_receive_noisy(y, codec, dist, M, frame_seed, graph.slot_counts(), amplitude)

    return score_trial(act.support, res.decoded_ids, spec.N,
                       symbols_sent=replicas * T,
                       energy_sent=replicas * T * amplitude ** 2)


def _run_trials(fn, trials: int, threads: int) -> list[TrialMetrics]:
    if threads <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def _infeasible_row(spec: ExperimentSpec, M: int, m: int) -> ResultRow:
    nan = float("nan")
    return ResultRow(
        framework=spec.framework, N=spec.N, k=spec.k, M=M, m=m,
        snr_bit_db=spec.channel.snr_bit_db, trials=0,
        mdr=nan, mdr_ci=nan, far=nan, far_ci=nan, plr=nan, flr=nan,
        energy_per_user=nan, seed=spec.seed, infeasible=True)


def run(spec: ExperimentSpec, threads: int = 1) -> list[ResultRow]:
    """Execute the sweep and aggregate each point into a ResultRow.

    Slotted sweep points smaller than the maximum replica degree cannot be
    simulated and come back flagged infeasible instead of failing the
    whole sweep.
    """
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    snr = spec.channel.snr_bit_db
    sigma = 0.0 if snr is None else 1.0
    rows = []
    for point in spec.sweep:
        t0 = time.perf_counter()
        if spec.framework == CS:
            m = point
            id_bits = SystemConfig(N=spec.N, k=max(spec.k, 0), m=m).id_bits
            amplitude = 1.0 if snr is None else snr_to_amplitude(snr, id_bits, sigma, CS)
            stop = None if snr is None else cs_mod.NoiseAdaptiveStop(sigma)
            trial = lambda t: _cs_trial(spec, m, t, sigma, amplitude, stop)
            M = 1
        else:
            M = point
            dist = spec.distribution()
            codec = IdCodec(spec.N, coded=snr is not None)
            m = M * codec.slot_symbols
            if dist.max_degree > M:
                rows.append(_infeasible_row(spec, M, m))
                continue
            if snr is None:
                amplitude = 1.0
            else:
                fec_expansion = dist.mean * codec.slot_symbols / codec.id_bits
                amplitude = snr_to_amplitude(snr, codec.id_bits, sigma, CSA, fec_expansion)
            trial = lambda t: _csa_trial(spec, M, t, sigma, amplitude, codec, dist)

        agg = aggregate(_run_trials(trial, spec.trials, threads))
        rows.append(ResultRow(
            framework=spec.framework, N=spec.N, k=spec.k, M=M, m=m,
            snr_bit_db=snr, trials=agg.trials,
            mdr=agg.mdr, mdr_ci=agg.mdr_ci, far=agg.far, far_ci=agg.far_ci,
            plr=agg.plr, flr=agg.flr,
            energy_per_user=agg.symbols_per_user, seed=spec.seed,
            wall_time_s=time.perf_counter() - t0))
    return rows
