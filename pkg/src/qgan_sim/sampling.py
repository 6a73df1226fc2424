"""Finite-shot measurement statistics for the adversarial read-out.

Each estimate measures both states with the same shot count n and reports
the observed frequencies together with their difference d_hat.  Counts are
exact binomial draws (numpy's inversion/BTPE sampler), never a normal
approximation, so small-n tails are honest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch import (
    DensityMatrix,
    GeneratorParams,
    MeasurementParams,
    measurement_axis,
    outcome_probability,
    pure_axis,
    state_bloch,
)
from .noise import NoiseSettings, apply_noise

__all__ = ["OutcomeEstimate", "sample_frequency", "estimate_d", "d_standard_deviation"]


@dataclass(frozen=True)
class OutcomeEstimate:
    """Shot-frequency estimates of (p_rho, p_sigma) and their difference.

    ``shots`` is the per-state shot count n; ``None`` marks an exact-mode
    estimate carrying the true probabilities.  ``d_hat`` always equals
    p_rho_hat - p_sigma_hat bit for bit.
    """

    p_rho_hat: float
    p_sigma_hat: float
    d_hat: float
    shots: int | None

    def __post_init__(self) -> None:
        if not (0.0 <= self.p_rho_hat <= 1.0 and 0.0 <= self.p_sigma_hat <= 1.0):
            raise ValueError("frequencies must be in [0, 1]")
        if self.d_hat != self.p_rho_hat - self.p_sigma_hat:
            raise ValueError("d_hat must equal p_rho_hat - p_sigma_hat exactly")
        if self.shots is not None and self.shots < 1:
            raise ValueError(f"shots must be a positive count, got {self.shots}")


def sample_frequency(p: float, n: int, rng: np.random.Generator) -> float:
    """Observed frequency k/n with k ~ Binomial(n, p)."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"probability must be in [0, 1], got {p}")
    if n < 1:
        raise ValueError(f"shot count must be >= 1, got {n}")
    return float(rng.binomial(n, p)) / n


def d_standard_deviation(p_rho: float, p_sigma: float, n: int) -> float:
    """Standard deviation of d_hat from two independent n-shot frequencies.

    sqrt(p_rho (1 - p_rho) / n + p_sigma (1 - p_sigma) / n); about
    1/sqrt(2n) near the d = 0 equilibrium where both probabilities are 1/2.
    """
    if not (0.0 <= p_rho <= 1.0 and 0.0 <= p_sigma <= 1.0):
        raise ValueError("probabilities must be in [0, 1]")
    if n < 1:
        raise ValueError(f"shot count must be >= 1, got {n}")
    return math.sqrt((p_rho * (1.0 - p_rho) + p_sigma * (1.0 - p_sigma)) / n)


def _branchwise_frequency(
    gen: GeneratorParams,
    p_branch_main: float,
    p_branch_alt: float,
    n: int,
    rng: np.random.Generator,
) -> float:
    # Physically faithful two-stage draw: pick the prepared branch per shot,
    # then the detection outcome.  Marginally identical to Binomial(n, p_rho).
    k_main = int(rng.binomial(n, gen.r))
    hits = int(rng.binomial(k_main, p_branch_main)) if k_main > 0 else 0
    rest = n - k_main
    if rest > 0:
        hits += int(rng.binomial(rest, p_branch_alt))
    return float(hits) / n


def estimate_d(
    gen: GeneratorParams,
    meas: MeasurementParams,
    sigma: DensityMatrix,
    shots: int | None,
    noise: NoiseSettings | None = None,
    rng: np.random.Generator | None = None,
    branchwise: bool = False,
) -> OutcomeEstimate:
    """Measure both states and report the outcome-difference estimate.

    Computes the exact probabilities from the Bloch geometry (after running
    the configured noise channel on each state), then samples each with n
    shots: the generated state first, then the true one.  ``shots=None``
    switches to exact mode and returns the true probabilities unsampled.

    ``branchwise=True`` samples the generated state by first drawing which
    ensemble branch was prepared on every shot; the marginal statistics are
    unchanged but the draw sequence mimics the physical procedure.
    """
    m = measurement_axis(meas)
    v_rho = apply_noise(noise, state_bloch(gen), "generated")
    v_sigma = apply_noise(noise, sigma.to_bloch(), "true")
    p_rho = outcome_probability(m, v_rho)
    p_sigma = outcome_probability(m, v_sigma)
    if shots is None:
        return OutcomeEstimate(p_rho, p_sigma, p_rho - p_sigma, None)
    if rng is None:
        raise ValueError("shot-limited estimation requires a random generator")
    if branchwise:
        branch = apply_noise(noise, pure_axis(gen.theta, gen.phi), "generated")
        anti = apply_noise(
            noise, pure_axis(math.pi - gen.theta, gen.phi + math.pi), "generated"
        )
        p_rho_hat = _branchwise_frequency(
            gen,
            outcome_probability(m, branch),
            outcome_probability(m, anti),
            shots,
            rng,
        )
    else:
        p_rho_hat = sample_frequency(p_rho, shots, rng)
    p_sigma_hat = sample_frequency(p_sigma, shots, rng)
    return OutcomeEstimate(p_rho_hat, p_sigma_hat, p_rho_hat - p_sigma_hat, shots)
