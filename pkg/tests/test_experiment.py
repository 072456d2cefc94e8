"""Monte Carlo harness: schedules, the estimation chain, determinism, reps."""

import math

import numpy as np
import pytest

from wernerdistill import bounds, experiment
from wernerdistill.experiment import (
    NoiseSchedule,
    TrialOutcome,
    derive_rep_seeds,
    empirical_failure_rate,
    estimate_from_counts,
    replay_algorithm1,
    run_algorithm1,
    run_repetitions,
    sample_trial,
)
from wernerdistill.protocol import NoisePairConfig


class TestNoiseSchedule:
    def test_fixed_values(self):
        xs = NoiseSchedule.fixed(0.3).x_values(5)
        np.testing.assert_array_equal(xs, np.full(5, 0.3))

    def test_noiseless(self):
        assert not NoiseSchedule.noiseless().x_values(3).any()

    def test_exponential_idle_scalar(self):
        xs = NoiseSchedule.exponential_idle(0.2, 1.0).x_values(4)
        np.testing.assert_allclose(xs, 1.0 - math.exp(-0.2), atol=1e-15)

    def test_exponential_idle_sequence(self):
        xs = NoiseSchedule.exponential_idle((0.0, math.log(2.0)), 1.0).x_values(2)
        np.testing.assert_allclose(xs, [0.0, 0.5], atol=1e-15)

    def test_sequence_length_must_match(self):
        schedule = NoiseSchedule.exponential_idle((0.1, 0.2), 1.0)
        with pytest.raises(ValueError):
            schedule.x_values(3)

    def test_validation(self):
        with pytest.raises(ValueError):
            NoiseSchedule.fixed(1.2)
        with pytest.raises(ValueError):
            NoiseSchedule.exponential_idle(-0.1, 1.0)
        with pytest.raises(ValueError):
            NoiseSchedule.exponential_idle(0.1, 0.0)


class TestSampleTrial:
    def test_deterministic(self):
        cfg = NoisePairConfig(0.5)
        a = [sample_trial(cfg, np.random.default_rng(5)) for _ in range(10)]
        b = [sample_trial(cfg, np.random.default_rng(5)) for _ in range(10)]
        assert a == b

    def test_perfect_pairs_always_agree(self):
        rng = np.random.default_rng(0)
        cfg = NoisePairConfig(0.0)
        for _ in range(200):
            outcome = sample_trial(cfg, rng)
            assert outcome.za == outcome.zb

    def test_signs_convention(self):
        """Outcome signs follow (za, zb) with "0" carrying +1."""
        assert experiment.OUTCOME_SIGNS == ((1, 1), (1, -1), (-1, 1), (-1, -1))

    def test_matches_vectorized_run(self):
        """N scalar draws and one vectorized run consume the seed identically."""
        n, w, seed = 500, 0.37, 123
        rng = np.random.default_rng(seed)
        cfg = NoisePairConfig(w)
        scalar_count = sum(1 for _ in range(n)
                           if sample_trial(cfg, rng) == TrialOutcome(1, 1))
        result = run_algorithm1(n, 0.05, w, seed=seed)
        assert result.n_count == scalar_count


class TestEstimationChain:
    def test_transcript_without_clamping(self):
        """8 of 20 correlated: every intermediate against hand arithmetic."""
        est = estimate_from_counts(8, 20, eps_w=0.1)
        w_hat = 1.0 - math.sqrt(0.6)
        assert est.p00_hat == 0.4
        assert est.w_hat == pytest.approx(w_hat, abs=1e-15)
        assert est.w_p == pytest.approx(w_hat + 0.1, abs=1e-15)
        assert est.w_m == pytest.approx(w_hat - 0.1, abs=1e-15)
        p00_p = (2.0 - 2.0 * est.w_p + est.w_p ** 2) / 4.0
        p00_m = (2.0 - 2.0 * est.w_m + est.w_m ** 2) / 4.0
        assert est.p00_p == pytest.approx(p00_p, abs=1e-15)
        assert est.p00_m == pytest.approx(p00_m, abs=1e-15)
        eps = max(abs(0.4 - p00_p), abs(0.4 - p00_m))
        assert est.eps == pytest.approx(eps, abs=1e-15)
        assert est.delta == min(1.0, 2.0 * math.exp(-2.0 * 20 * eps ** 2))
        assert not est.clamped

    def test_transcript_with_upper_clamp(self):
        """13 of 20 gives p00_hat = 0.65, clamped to 0.5, so w_hat = 0 with a flag."""
        est = estimate_from_counts(13, 20, eps_w=0.1)
        assert est.p00_hat == 0.65
        assert est.w_hat == 0.0
        assert est.clamped

    def test_transcript_with_lower_clamp(self):
        """No correlated outcomes: p00_hat = 0 clamps to 1/4, so w_hat = 1."""
        est = estimate_from_counts(0, 4, eps_w=0.05)
        assert est.w_hat == 1.0
        assert est.clamped
        assert est.w_p == 1.0  # shifted weight clamped back into [0, 1]

    def test_uncapped_delta(self):
        """With more rounds the certificate leaves the vacuous regime."""
        est = estimate_from_counts(800, 2000, eps_w=0.1)
        assert est.eps == pytest.approx(abs(0.4 - est.p00_m), abs=1e-15)
        assert est.delta == pytest.approx(2.0 * math.exp(-2.0 * 2000 * est.eps ** 2), rel=1e-12)
        assert est.delta < 1.0

    def test_domain(self):
        with pytest.raises(ValueError):
            estimate_from_counts(0, 0, 0.1)
        with pytest.raises(ValueError):
            estimate_from_counts(5, 4, 0.1)
        with pytest.raises(ValueError):
            estimate_from_counts(1, 4, 0.0)

    def test_replay_counts_only_double_plus(self):
        outcomes = [TrialOutcome(1, 1)] * 13 + [TrialOutcome(-1, 1)] * 3 + \
            [TrialOutcome(1, -1)] * 2 + [TrialOutcome(-1, -1)] * 2
        est = replay_algorithm1(outcomes, eps_w=0.1)
        assert est.n_count == 13
        assert est.N == 20
        assert est.p00_hat == 0.65


class TestRunAlgorithm1:
    def test_deterministic(self):
        a = run_algorithm1(2000, 0.05, 0.3, seed=42)
        b = run_algorithm1(2000, 0.05, 0.3, seed=42)
        assert a == b
        c = run_algorithm1(2000, 0.05, 0.3, seed=43)
        assert a.counts != c.counts

    def test_counts_partition_rounds(self):
        result = run_algorithm1(5000, 0.05, 0.5, seed=9)
        assert sum(result.counts) == 5000
        assert result.n_count == result.counts[0]

    def test_estimate_converges(self):
        result = run_algorithm1(200_000, 0.05, 0.4, seed=1)
        assert result.w_hat == pytest.approx(0.4, abs=0.01)
        assert not result.clamped

    def test_fully_mixed_outcomes_uniform(self):
        n = 100_000
        result = run_algorithm1(n, 0.5, 1.0, seed=3)
        sigma = (n * 0.25 * 0.75) ** 0.5
        for c in result.counts:
            assert abs(c - n / 4.0) < 5.0 * sigma

    def test_realized_s_fixed(self):
        result = run_algorithm1(1000, 0.05, 0.3, NoiseSchedule.fixed(0.3), seed=0)
        assert result.realized_S == pytest.approx(0.7, abs=1e-15)

    def test_realized_s_exponential(self):
        result = run_algorithm1(1000, 0.05, 0.3, NoiseSchedule.exponential_idle(0.2, 1.0), seed=0)
        assert result.realized_S == pytest.approx(math.exp(-0.2), abs=1e-12)

    def test_realized_s_sequence(self):
        schedule = NoiseSchedule.exponential_idle((0.0, math.log(2.0)), 1.0)
        result = run_algorithm1(2, 0.05, 0.3, schedule, seed=0)
        assert result.realized_S == pytest.approx(0.75, abs=1e-15)

    def test_dense_oracle_path_agrees(self):
        fast = run_algorithm1(2000, 0.05, 0.35, NoiseSchedule.fixed(0.2), seed=8)
        slow = run_algorithm1(2000, 0.05, 0.35, NoiseSchedule.fixed(0.2), seed=8,
                              use_dense_oracle=True)
        assert fast.counts == slow.counts

    def test_noise_biases_estimate_upward(self):
        """The noise-free inversion over-reads w when the kept copy decohered."""
        result = run_algorithm1(200_000, 0.05, 0.3, NoiseSchedule.exponential_idle(0.2, 1.0),
                                seed=4)
        assert result.w_hat > 0.33

    def test_domain(self):
        with pytest.raises(ValueError):
            run_algorithm1(0, 0.05, 0.3)
        with pytest.raises(ValueError):
            run_algorithm1(10, 0.05, 1.3)


class TestRepetitions:
    def test_worker_count_does_not_change_results(self):
        serial = run_repetitions(0.3, 500, 0.05, reps=40, master_seed=7, workers=1)
        threaded = run_repetitions(0.3, 500, 0.05, reps=40, master_seed=7, workers=4)
        assert serial == threaded

    def test_seed_derivation_is_deterministic(self):
        a = derive_rep_seeds(99, 8)
        b = derive_rep_seeds(99, 8)
        np.testing.assert_array_equal(a, b)
        assert len(set(int(s) for s in a)) == 8

    def test_rate_matches_records(self):
        summary = run_repetitions(0.4, 400, 0.05, reps=30, master_seed=1)
        assert summary.failure_rate == sum(r.fail for r in summary.records) / 30
        assert summary.failure_rate == empirical_failure_rate(0.4, 400, 0.05, reps=30,
                                                              master_seed=1)

    def test_rate_is_permutation_invariant(self):
        summary = run_repetitions(0.4, 400, 0.05, reps=30, master_seed=1)
        shuffled = sorted(summary.records, key=lambda r: r.seed)
        assert sum(r.fail for r in shuffled) / 30 == summary.failure_rate

    def test_rate_respects_bound(self):
        """Empirical failure frequency stays within the analytic budget plus 3 sigma."""
        delta = 0.1
        n = bounds.min_samples(bounds.METHOD_DISTILL, 0.1, delta, w=0.2)
        rate = empirical_failure_rate(0.2, n, 0.1, reps=200, master_seed=5)
        assert rate <= delta + 3.0 * math.sqrt(delta * (1.0 - delta) / 200)

    def test_easy_regime_never_fails(self):
        assert empirical_failure_rate(0.0, 10_000, 0.05, reps=50, master_seed=2) == 0.0

    def test_domain(self):
        with pytest.raises(ValueError):
            run_repetitions(0.3, 100, 0.05, reps=0)


class TestSerialization:
    def test_json_round_trip_byte_identical(self):
        result = run_algorithm1(1000, 0.05, 0.3, seed=21)
        text = result.to_json()
        assert experiment.ExperimentResult.from_json(text) == result
        assert experiment.ExperimentResult.from_json(text).to_json() == text

    def test_result_csv_shape(self):
        result = run_algorithm1(1000, 0.05, 0.3, seed=21)
        lines = result.to_csv().strip().split("\n")
        assert lines[0] == experiment.RESULT_CSV_HEADER
        assert len(lines) == 2
        assert lines[1].split(",")[0] == "1000"

    def test_reps_csv_shape(self):
        summary = run_repetitions(0.3, 200, 0.05, reps=5, master_seed=3)
        lines = experiment.repetitions_to_csv(summary).strip().split("\n")
        assert lines[0] == "rep,seed,w_hat,fail"
        assert len(lines) == 6
        assert lines[1].split(",")[0] == "0"
        assert lines[1].split(",")[3] in ("0", "1")
