"""ramimo: link-level simulator for atomic MIMO receivers that read out only
signal amplitudes, with dual-slot phase-rotated transmission for recovering
the complex received signal and conventional ML/ZF detection on top."""

__version__ = "0.1.0"

from .constellation import Constellation, make_qam, modulate, quantize, demap
from .channel import (
    ChannelRealization,
    ReferenceSignal,
    NoiseSpec,
    draw_channel,
    draw_reference,
    draw_noise,
    stream_rng,
    derive_point_seed,
)
from .frontend import DualSlotObservation, observe_single, observe_prss
from .reconstruct import (
    EffectiveObservation,
    ReconstructedSignal,
    MeasurementMatrix,
    DegenerateReferenceError,
    SingularOffsetError,
    effective_observations,
    reconstruct_optimal,
    build_measurement_matrix,
    reconstruct_general,
    predicted_trace,
    predicted_mse,
    empirical_noise_variance,
)
from .detect import (
    DetectionResult,
    SearchBudgetError,
    IllConditionedChannelError,
    ml_linear,
    zf_linear,
    ml_single_shot,
)
from .montecarlo import (
    ExperimentConfig,
    TrialResult,
    BerEstimate,
    BerSweepRecord,
    PhiSweepRecord,
    RsrSweepRecord,
    default_phi_grid,
    run_trial,
    run_variance_trial,
    run_ber_sweep,
    run_phi_sweep,
    run_rsr_sweep,
)
