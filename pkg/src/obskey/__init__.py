"""Obfuscated-channel secret key generation: simulator, extraction pipeline,
and adversary evaluations."""

from .channel import (
    ChannelSet,
    EvolutionParams,
    SpatialChannel,
    estimate_csi,
    evolve,
    generate_channel_set,
    observe,
    round_robin_index,
)
from .config import ExperimentConfig, load_config, save_config
from .errors import (
    KeyTooShortError,
    ObskeyError,
    ParameterError,
    ReconciliationInfeasibleError,
    StageError,
    TraceFormatError,
)
from .kl import (
    BlockShape,
    KLTransform,
    TransformBasis,
    apply_transform,
    basis_leakage,
    compute_basis,
    rearrange,
    unrearrange,
)
from .metrics import KeyMetrics, NdDistribution, bgr, bmr, cross_correlation, nd_distribution
from .nist import NistReport, nist_suite
from .pipeline import RunReport, run_experiment, sweep
from .probing import (
    CampaignResult,
    FilterTaps,
    ObfuscationState,
    RoundResult,
    draw_antenna_index,
    draw_filter_taps,
    filter_response,
    probe_round,
    run_probing_campaign,
)
from .quantizer import (
    AdaptiveQuantizer,
    QuantizerConfig,
    RawKey,
    apply_mask_intersection,
    assign_levels,
    gray_encode,
    quantize,
    window_thresholds,
)
from .reconcile import (
    LeakageBudget,
    leakage,
    privacy_amplify,
    reconcile,
    select_code,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptiveQuantizer",
    "BlockShape",
    "CampaignResult",
    "ChannelSet",
    "EvolutionParams",
    "ExperimentConfig",
    "FilterTaps",
    "KLTransform",
    "KeyMetrics",
    "KeyTooShortError",
    "LeakageBudget",
    "NdDistribution",
    "NistReport",
    "ObfuscationState",
    "ObskeyError",
    "ParameterError",
    "QuantizerConfig",
    "RawKey",
    "ReconciliationInfeasibleError",
    "RoundResult",
    "RunReport",
    "SpatialChannel",
    "StageError",
    "TraceFormatError",
    "TransformBasis",
    "apply_mask_intersection",
    "apply_transform",
    "assign_levels",
    "basis_leakage",
    "bgr",
    "bmr",
    "compute_basis",
    "cross_correlation",
    "draw_antenna_index",
    "draw_filter_taps",
    "estimate_csi",
    "evolve",
    "filter_response",
    "generate_channel_set",
    "gray_encode",
    "leakage",
    "load_config",
    "nd_distribution",
    "nist_suite",
    "observe",
    "privacy_amplify",
    "probe_round",
    "quantize",
    "rearrange",
    "reconcile",
    "round_robin_index",
    "run_experiment",
    "run_probing_campaign",
    "save_config",
    "select_code",
    "sweep",
    "unrearrange",
    "window_thresholds",
]
