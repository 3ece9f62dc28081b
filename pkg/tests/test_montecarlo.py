"""Stochastic oracle: the simulation must reproduce the closed-form algebra."""

import math

import pytest

from lhvlab import (
    AsymmetricModelError,
    InsufficientSamplesError,
    InvalidResponseError,
    LhvModel,
    CosineResponse,
    Orientation,
    RunConfig,
    Tally,
    enhance,
    estimate_ch_mc,
    inhibit,
    memoryless,
    reference_model,
    simulate_run,
    symmetric_model,
)

import oracle_values as ov

PI8 = math.pi / 8.0


class TestRunConfig:
    def test_requires_exactly_one_setting_form(self):
        rule = memoryless()
        with pytest.raises(ValueError):
            RunConfig(n_pairs=10, seed=1, rule=rule)
        with pytest.raises(ValueError):
            RunConfig(n_pairs=10, seed=1, rule=rule, phi=0.1, alpha=0.1, beta=0.0)
        with pytest.raises(ValueError):
            RunConfig(n_pairs=10, seed=1, rule=rule, alpha=0.1)

    def test_seed_and_sizes_validated(self):
        rule = memoryless()
        with pytest.raises(ValueError):
            RunConfig(n_pairs=0, seed=1, rule=rule, phi=0.1)
        with pytest.raises(ValueError):
            RunConfig(n_pairs=10, seed=-1, rule=rule, phi=0.1)
        with pytest.raises(ValueError):
            RunConfig(n_pairs=10, seed=2**64, rule=rule, phi=0.1)


class TestTally:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            Tally(events=10, singles_a=4, singles_b=4, coincidences=5)
        with pytest.raises(ValueError):
            Tally(events=4, singles_a=5, singles_b=2, coincidences=1)
        tally = Tally(events=10, singles_a=4, singles_b=6, coincidences=3)
        assert tally.coincidences <= min(tally.singles_a, tally.singles_b)


class TestSimulateRun:
    def test_deterministic_and_thread_invariant(self):
        model = reference_model()
        base = dict(n_pairs=30_000, seed=99, rule=inhibit(0.7), phi=PI8)
        first = simulate_run(model, RunConfig(**base))
        second = simulate_run(model, RunConfig(**base))
        assert first == second
        threaded = simulate_run(model, RunConfig(**base, threads=2))
        assert threaded == first

    def test_certain_detection(self):
        model = symmetric_model(1.0, 0.0, 0.0)
        result = simulate_run(model, RunConfig(n_pairs=2_000, seed=5, rule=memoryless(), phi=0.3))
        assert result.p_a.value == 1.0
        assert result.p_b.value == 1.0
        assert result.p_ab.value == 1.0
        enhanced = simulate_run(model, RunConfig(n_pairs=2_000, seed=5, rule=enhance(), phi=0.3))
        assert enhanced.p_a.value == 1.0

    def test_memoryless_coincidence_rate(self):
        result = simulate_run(
            reference_model(),
            RunConfig(n_pairs=1_000_000, seed=20, rule=memoryless(), phi=PI8),
        )
        assert abs(result.p_ab.value - ov.P_AB_PI8) <= 3 * result.p_ab.stderr

    def test_inhibited_singles_rate(self):
        result = simulate_run(
            reference_model(),
            RunConfig(n_pairs=1_000_000, seed=21, rule=inhibit(), phi=PI8),
        )
        assert abs(result.p_a.value - ov.INHIBIT_P_A) <= 3 * result.p_a.stderr

    def test_explicit_settings_match_effective_angle(self):
        """(alpha, beta) and phi = alpha + beta sample the same statistics."""
        model = reference_model()
        split = simulate_run(model, RunConfig(n_pairs=400_000, seed=31, rule=memoryless(), alpha=0.2, beta=0.3))
        from lhvlab import coincidence_closed

        expected = coincidence_closed(model, 0.5)
        assert abs(split.p_ab.value - expected) <= 4 * split.p_ab.stderr

    def test_tally_invariants_hold(self):
        result = simulate_run(
            reference_model(),
            RunConfig(n_pairs=50_000, seed=77, rule=enhance(0.3), phi=1.1),
        )
        tally = result.tally
        assert tally.events == 100_000
        assert tally.coincidences <= min(tally.singles_a, tally.singles_b) <= tally.events

    def test_positive_correlation_through_hidden_variable(self):
        """At phi = 0 the shared variable correlates detections positively."""
        result = simulate_run(
            reference_model(),
            RunConfig(n_pairs=500_000, seed=13, rule=memoryless(), phi=0.0),
        )
        floor = result.p_a.value * result.p_b.value - 4 * result.p_ab.stderr
        assert result.p_ab.value >= floor

    def test_invalid_model_rejected(self):
        bad = symmetric_model(0.5, 0.6, 0.0)
        with pytest.raises(InvalidResponseError):
            simulate_run(bad, RunConfig(n_pairs=10, seed=1, rule=memoryless(), phi=0.1))


class TestStrengthMonotonicity:
    def test_inhibit_decreases_and_enhance_increases_singles(self):
        model = reference_model()
        strengths = [0.0, 0.25, 0.5, 0.75, 1.0]

        def p_a(rule_factory, s, seed):
            result = simulate_run(
                model, RunConfig(n_pairs=200_000, seed=seed, rule=rule_factory(s), phi=PI8)
            )
            return result.p_a

        inhibited = [p_a(inhibit, s, 100 + i) for i, s in enumerate(strengths)]
        for prev, nxt in zip(inhibited, inhibited[1:]):
            assert nxt.value <= prev.value + 3 * (prev.stderr + nxt.stderr)
        enhanced = [p_a(enhance, s, 200 + i) for i, s in enumerate(strengths)]
        for prev, nxt in zip(enhanced, enhanced[1:]):
            assert nxt.value >= prev.value - 3 * (prev.stderr + nxt.stderr)


class TestEstimateChMc:
    def test_bit_identical_repeats(self):
        model = reference_model()
        first = estimate_ch_mc(model, memoryless(), PI8, 20_000, 42)
        second = estimate_ch_mc(model, memoryless(), PI8, 20_000, 42)
        assert first == second
        threaded = estimate_ch_mc(model, memoryless(), PI8, 20_000, 42, threads=2)
        assert threaded == first

    def test_memoryless_estimate(self):
        result = estimate_ch_mc(reference_model(), memoryless(), PI8, 1_000_000, 7)
        assert abs(result.b.value - ov.B_MEMORYLESS) <= 3 * result.b.stderr
        assert abs(result.p_a.value - ov.P_A) <= 3 * result.p_a.stderr
        assert abs(result.p_ab_phi.value - ov.P_AB_PI8) <= 3 * result.p_ab_phi.stderr
        assert abs(result.p_ab_3phi.value - ov.P_AB_3PI8) <= 3 * result.p_ab_3phi.stderr

    def test_fractional_strength_matches_block_algebra(self):
        """The Monte Carlo process certifies the general-strength closed forms."""
        model = reference_model()
        half_inhibit = estimate_ch_mc(model, inhibit(0.5), PI8, 800_000, 8, threads=2)
        assert abs(half_inhibit.p_a.value - ov.INHIBIT_HALF_P_A) <= 4 * half_inhibit.p_a.stderr
        assert abs(half_inhibit.p_ab_phi.value - ov.INHIBIT_HALF_P_AB) <= 4 * half_inhibit.p_ab_phi.stderr
        assert abs(half_inhibit.b.value - ov.B_INHIBIT_HALF) <= 4 * half_inhibit.b.stderr
        half_enhance = estimate_ch_mc(model, enhance(0.5), PI8, 800_000, 9, threads=2)
        assert abs(half_enhance.p_a.value - ov.ENHANCE_HALF_P_A) <= 4 * half_enhance.p_a.stderr
        assert abs(half_enhance.p_ab_phi.value - ov.ENHANCE_HALF_P_AB) <= 4 * half_enhance.p_ab_phi.stderr
        assert abs(half_enhance.b.value - ov.B_ENHANCE_HALF) <= 4 * half_enhance.b.stderr

    def test_oracle_agreement_across_rules_and_angles(self):
        """Every rule/angle cell agrees with the closed-form block algebra."""
        from lhvlab import ch_with_memory, memory_adjusted_rates, rates_closed

        model = reference_model()
        rules = [memoryless(), inhibit(1.0), enhance(1.0), inhibit(0.5), enhance(0.5)]
        for rule in rules:
            for phi in (0.0, PI8, math.pi / 4, 3 * PI8):
                est = estimate_ch_mc(model, rule, phi, 200_000, 1, threads=2)
                adjusted = memory_adjusted_rates(rates_closed(model, phi), rule)
                assert abs(est.p_a.value - adjusted.p_a) <= 4 * est.p_a.stderr
                assert abs(est.p_ab_phi.value - adjusted.p_ab) <= 4 * est.p_ab_phi.stderr
                expected_b = ch_with_memory(model, rule, phi).b
                assert abs(est.b.value - expected_b) <= 4 * est.b.stderr

    def test_insufficient_samples(self):
        with pytest.raises(InsufficientSamplesError):
            estimate_ch_mc(reference_model(), memoryless(), PI8, 50, 1)

    def test_asymmetric_model_rejected(self):
        lopsided = LhvModel(
            alice=CosineResponse(0.3, 0.0, 0.0, Orientation.MINUS),
            bob=CosineResponse(0.4, 0.0, 0.0, Orientation.PLUS),
        )
        with pytest.raises(AsymmetricModelError):
            estimate_ch_mc(lopsided, memoryless(), PI8, 1_000, 1)
