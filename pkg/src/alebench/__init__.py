"""Adaptive line enhancer noise cancellation with LMS and PSO adaptation."""

from .ale import AleConfig, FilterRun, filter_frame, regressor
from .channel import (
    DEFAULT_PROFILES,
    ChannelConfig,
    NoisyFrame,
    NonlinearProfile,
    add_awgn,
    apply_nonlinear,
    transmit,
)
from .errors import ConfigError, DivergenceError
from .lms import LmsConfig, LmsTrace, lms_run, lms_step
from .metrics import MetricRecord, ber, mse
from .pso import (
    CostEval,
    Particle,
    PsoConfig,
    SwarmState,
    evaluate_cost,
    init_swarm,
    run_pso,
    update_position,
    update_velocity,
)
from .signal import ModConfig, align_and_compare, demodulate, generate_bits, modulate

__version__ = "0.1.0"

__all__ = [
    "AleConfig",
    "FilterRun",
    "filter_frame",
    "regressor",
    "ChannelConfig",
    "NonlinearProfile",
    "NoisyFrame",
    "DEFAULT_PROFILES",
    "add_awgn",
    "apply_nonlinear",
    "transmit",
    "ConfigError",
    "DivergenceError",
    "LmsConfig",
    "LmsTrace",
    "lms_run",
    "lms_step",
    "MetricRecord",
    "ber",
    "mse",
    "CostEval",
    "Particle",
    "PsoConfig",
    "SwarmState",
    "evaluate_cost",
    "init_swarm",
    "run_pso",
    "update_position",
    "update_velocity",
    "ModConfig",
    "align_and_compare",
    "demodulate",
    "generate_bits",
    "modulate",
    "__version__",
]
