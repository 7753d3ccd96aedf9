"""Simulation toolkit for user activity detection in machine-type
communication: a sparse-recovery detector over dense codebooks and a
slotted replica detector with successive interference cancellation,
with the asymptotic calculators both are judged against.
"""

__version__ = "0.1.0"

from .asymptotics import (
    DeProbe,
    DeResult,
    biawgn_capacity,
    csa_required_slots,
    csa_required_symbols,
    de_probe,
    density_evolution_threshold,
    noisy_csa_required_symbols,
)
from .cs import (
    DenseCodebook,
    MaxIterations,
    NoiseAdaptiveStop,
    OmpResult,
    ResidualBelow,
    coherence,
    empirical_m_estimate,
    gen_bernoulli_codebook,
    noise_floor_threshold,
    omp,
    recoverable_amplitude,
    required_m_bound,
)
from .csa import (
    DEFAULT_DISTRIBUTION,
    CsaDecodeResult,
    DegreeDistribution,
    FrameGraph,
    IdCodec,
    build_csa_codeword,
    build_frame,
    csa_receive_noisy,
    peel_decode,
    replica_slots,
)
from .errors import ConditionNotMet, ConfigError, RuntimeFailure, UadetError
from .experiments import ChannelSpec, ExperimentSpec, ResultRow, load_config
from .metrics import AggregateMetrics, TrialMetrics, aggregate, score_trial, union_bound_flr
from .model import (
    CS,
    CSA,
    ActivityVector,
    Channel,
    SystemConfig,
    apply_channel,
    draw_active_set,
    snr_to_amplitude,
    substream,
)
from .runner import run
