"""Shot statistics: binomial frequencies and the d estimator."""

import math

import numpy as np
import pytest

import oracles
from qgan_sim import (
    BlochVector,
    DensityMatrix,
    GeneratorParams,
    MeasurementParams,
    OutcomeEstimate,
    d_standard_deviation,
    estimate_d,
    measurement_axis,
    outcome_probability,
    sample_frequency,
    state_bloch,
)


class TestSampleFrequency:
    def test_impossible_outcome(self):
        rng = np.random.default_rng(0)
        assert all(sample_frequency(0.0, n, rng) == 0.0 for n in (1, 10, 5000))

    def test_certain_outcome(self):
        rng = np.random.default_rng(0)
        assert all(sample_frequency(1.0, n, rng) == 1.0 for n in (1, 10, 5000))

    def test_rejects_bad_probability(self):
        with pytest.raises(ValueError, match="probability"):
            sample_frequency(1.2, 10, np.random.default_rng(0))

    def test_rejects_zero_shots(self):
        with pytest.raises(ValueError, match="shot count"):
            sample_frequency(0.5, 0, np.random.default_rng(0))

    def test_standard_deviation_matches_binomial(self):
        # Oracle: sd of k/n is sqrt(p (1-p) / n) = 0.00707 at p=1/2, n=5000.
        rng = np.random.default_rng(42)
        freqs = np.array([sample_frequency(0.5, 5000, rng) for _ in range(10_000)])
        expected = math.sqrt(0.25 / 5000)
        assert abs(freqs.std(ddof=1) - expected) / expected < 0.05

    def test_unbiased(self):
        rng = np.random.default_rng(43)
        reps = 100_000
        freqs = np.array([sample_frequency(0.3, 100, rng) for _ in range(reps)])
        standard_error = math.sqrt(0.3 * 0.7 / 100) / math.sqrt(reps)
        assert abs(freqs.mean() - 0.3) < 3 * standard_error


class TestDStandardDeviation:
    def test_equilibrium_value(self):
        assert d_standard_deviation(0.5, 0.5, 5000) == pytest.approx(0.01, rel=1e-3)

    def test_deterministic_outcomes(self):
        assert d_standard_deviation(0.0, 0.0, 100) == 0.0

    def test_direct_formula_point(self):
        # sqrt(0.09/100 + 0.09/100)
        assert d_standard_deviation(0.9, 0.1, 100) == pytest.approx(0.042426407, abs=1e-9)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            d_standard_deviation(1.5, 0.5, 100)
        with pytest.raises(ValueError):
            d_standard_deviation(0.5, 0.5, 0)


class TestOutcomeEstimate:
    def test_difference_identity_enforced(self):
        with pytest.raises(ValueError, match="d_hat"):
            OutcomeEstimate(0.6, 0.5, 0.2, 100)

    def test_rejects_non_positive_shots(self):
        with pytest.raises(ValueError, match="shots"):
            OutcomeEstimate(0.5, 0.5, 0.0, 0)

    def test_exact_mode_sentinel(self):
        est = OutcomeEstimate(0.5, 0.25, 0.25, None)
        assert est.shots is None


class TestEstimateD:
    def test_identical_states_exact(self):
        est = estimate_d(
            GeneratorParams(1, 0, 0),
            MeasurementParams(0, 0),
            DensityMatrix.pure_ground(),
            None,
        )
        assert est.p_rho_hat == est.p_sigma_hat == 1.0
        assert est.d_hat == 0.0

    def test_orthogonal_state_exact(self):
        est = estimate_d(
            GeneratorParams(1, math.pi, 0),
            MeasurementParams(0, 0),
            DensityMatrix.pure_ground(),
            None,
        )
        assert est.d_hat == pytest.approx(-1.0, abs=1e-12)
        assert est.p_rho_hat == pytest.approx(0.0, abs=1e-12)

    def test_exact_mode_matches_bloch_formula(self):
        rng = np.random.default_rng(50)
        sigma = DensityMatrix(oracles.random_density(rng))
        for _ in range(200):
            gen = GeneratorParams(
                float(rng.uniform(0, 1)),
                float(rng.uniform(0, math.pi)),
                float(rng.uniform(0, 2 * math.pi)),
            )
            meas = MeasurementParams(
                float(rng.uniform(0, math.pi)), float(rng.uniform(0, 2 * math.pi))
            )
            est = estimate_d(gen, meas, sigma, None)
            m = measurement_axis(meas)
            expected = outcome_probability(m, state_bloch(gen)) - outcome_probability(
                m, sigma.to_bloch()
            )
            assert est.d_hat == pytest.approx(expected, abs=1e-12)

    def test_near_equilibrium_noise_scale(self):
        # Both probabilities 1/2, so sd of d_hat should be 1/sqrt(2n) = 0.01.
        gen = GeneratorParams(0.5, 1.0, 2.0)
        meas = MeasurementParams(1.3, 0.7)
        sigma = DensityMatrix.maximally_mixed()
        rng = np.random.default_rng(51)
        ds = np.array(
            [estimate_d(gen, meas, sigma, 5000, rng=rng).d_hat for _ in range(10_000)]
        )
        assert abs(ds.std(ddof=1) - 0.01) / 0.01 < 0.10

    def test_empirical_sd_matches_formula(self):
        rng = np.random.default_rng(52)
        cases = [(0.5, 0.5, 5000), (0.9, 0.1, 1000)]
        for p_rho, p_sigma, n in cases:
            # States along +z with the right populations (p_rho = r at theta=0).
            gen = GeneratorParams(p_rho, 0.0, 0.0)
            sigma = DensityMatrix.from_bloch(BlochVector(0, 0, 2 * p_sigma - 1))
            meas = MeasurementParams(0.0, 0.0)
            ds = np.array(
                [estimate_d(gen, meas, sigma, n, rng=rng).d_hat for _ in range(10_000)]
            )
            expected = d_standard_deviation(p_rho, p_sigma, n)
            assert abs(ds.std(ddof=1) - expected) / expected < 0.10

    def test_counts_are_integral(self):
        rng = np.random.default_rng(53)
        for _ in range(200):
            gen = GeneratorParams(float(rng.uniform(0, 1)), 1.0, 0.5)
            est = estimate_d(
                gen, MeasurementParams(0.4, 1.1), DensityMatrix.maximally_mixed(),
                321, rng=rng,
            )
            for freq in (est.p_rho_hat, est.p_sigma_hat):
                assert abs(freq * 321 - round(freq * 321)) < 1e-9

    def test_deterministic_given_seed(self):
        gen = GeneratorParams(0.7, 0.9, 1.1)
        meas = MeasurementParams(0.3, 0.2)
        sigma = DensityMatrix.pure_ground()
        a = [
            estimate_d(gen, meas, sigma, 5000, rng=np.random.default_rng(99))
            for _ in range(1)
        ]
        b = [
            estimate_d(gen, meas, sigma, 5000, rng=np.random.default_rng(99))
            for _ in range(1)
        ]
        assert a == b

    def test_requires_rng_in_shot_mode(self):
        with pytest.raises(ValueError, match="random generator"):
            estimate_d(
                GeneratorParams(1, 0, 0), MeasurementParams(0, 0),
                DensityMatrix.pure_ground(), 100,
            )

    def test_branchwise_marginal_statistics(self):
        # Branch-then-outcome sampling must stay Binomial(n, p_rho) overall.
        gen = GeneratorParams(0.37, 1.2, 0.4)
        meas = MeasurementParams(0.9, 2.2)
        sigma = DensityMatrix.maximally_mixed()
        rng = np.random.default_rng(54)
        reps = 20_000
        ds = np.array(
            [
                estimate_d(gen, meas, sigma, 200, rng=rng, branchwise=True).p_rho_hat
                for _ in range(reps)
            ]
        )
        p = outcome_probability(measurement_axis(meas), state_bloch(gen))
        standard_error = math.sqrt(p * (1 - p) / 200) / math.sqrt(reps)
        assert abs(ds.mean() - p) < 4 * standard_error
        expected_sd = math.sqrt(p * (1 - p) / 200)
        assert abs(ds.std(ddof=1) - expected_sd) / expected_sd < 0.10

    def test_branchwise_deterministic(self):
        gen = GeneratorParams(0.37, 1.2, 0.4)
        meas = MeasurementParams(0.9, 2.2)
        sigma = DensityMatrix.pure_ground()
        a = estimate_d(gen, meas, sigma, 500, rng=np.random.default_rng(1), branchwise=True)
        b = estimate_d(gen, meas, sigma, 500, rng=np.random.default_rng(1), branchwise=True)
        assert a == b
