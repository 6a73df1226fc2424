"""Numerical simulator of a single-qubit adversarial state-learning game.

A generator prepares parameterized mixed qubit states; a discriminator
tunes a projective measurement to tell them from a fixed true state; the
two alternate noisy-gradient turns until the measurement can no longer
separate them.
"""

from .bloch import (
    BlochVector,
    DensityMatrix,
    GeneratorParams,
    MeasurementParams,
    fidelity,
    measurement_axis,
    optimal_axis,
    outcome_probability,
    pure_axis,
    random_initial_params,
    random_true_state,
    state_bloch,
    trace_distance,
)
from .game import (
    GameConfig,
    GameTrace,
    StepRecord,
    fidelity_trajectory,
    finite_diff_gradient,
    run_game,
    run_turn,
    shots_consumed,
)
from .harness import (
    BatchSummary,
    ConfigError,
    ExperimentSpec,
    SigmaSpec,
    load_experiment,
    run_batch,
    run_experiment,
    summarize_batch,
)
from .noise import NoiseSettings, amplitude_damp, apply_noise, depolarize
from .sampling import OutcomeEstimate, d_standard_deviation, estimate_d, sample_frequency

__all__ = [
    "BlochVector",
    "DensityMatrix",
    "GeneratorParams",
    "MeasurementParams",
    "fidelity",
    "measurement_axis",
    "optimal_axis",
    "outcome_probability",
    "pure_axis",
    "random_initial_params",
    "random_true_state",
    "state_bloch",
    "trace_distance",
    "GameConfig",
    "GameTrace",
    "StepRecord",
    "fidelity_trajectory",
    "finite_diff_gradient",
    "run_game",
    "run_turn",
    "shots_consumed",
    "BatchSummary",
    "ConfigError",
    "ExperimentSpec",
    "SigmaSpec",
    "load_experiment",
    "run_batch",
    "run_experiment",
    "summarize_batch",
    "NoiseSettings",
    "amplitude_damp",
    "apply_noise",
    "depolarize",
    "OutcomeEstimate",
    "d_standard_deviation",
    "estimate_d",
    "sample_frequency",
]

__version__ = "0.1.0"
