"""Tests for the trial-level simulation engine."""

import math

import numpy as np
import pytest

from ris_ssm.analytics import (
    LinkBudget,
    cpep_correct_beam,
    cpep_wrong_beam,
    ergodic_capacity_lb,
)
from ris_ssm.modulation import hamming_distance, make_config
from ris_ssm.montecarlo import (
    SweepResult,
    TrialPlan,
    run_ber_point,
    simulate_abep,
    simulate_benchmark,
    simulate_capacity,
    simulate_random_selection,
)

CFG_SMALL = make_config(4, 2, "psk", 2)


class TestDeterminism:
    def test_worker_count_does_not_change_results(self):
        budget = LinkBudget(10.0)
        results = [
            simulate_abep(CFG_SMALL, budget, TrialPlan(trials=80_000, master_seed=7, workers=w))
            for w in (1, 2, 8)
        ]
        assert len({r.bit_errors for r in results}) == 1
        assert len({r.ber_mc for r in results}) == 1

    def test_rerun_is_bit_identical(self):
        budget = LinkBudget(8.0)
        plan = TrialPlan(trials=50_000, master_seed=123)
        a = simulate_abep(CFG_SMALL, budget, plan)
        b = simulate_abep(CFG_SMALL, budget, plan)
        assert a.bit_errors == b.bit_errors

    def test_different_seeds_differ(self):
        budget = LinkBudget(8.0)
        a = simulate_abep(CFG_SMALL, budget, TrialPlan(trials=50_000, master_seed=1))
        b = simulate_abep(CFG_SMALL, budget, TrialPlan(trials=50_000, master_seed=2))
        assert a.bit_errors != b.bit_errors

    def test_capacity_reduction_is_worker_independent(self):
        cfg = make_config(6, 4, "psk", 4)
        budget = LinkBudget(12.0)
        values = {
            simulate_capacity(cfg, budget, TrialPlan(trials=60_000, master_seed=5, workers=w))
            for w in (1, 4)
        }
        assert len(values) == 1


class TestAbstractChain:
    def test_noiseless_detection_is_error_free(self):
        row = simulate_abep(CFG_SMALL, LinkBudget(300.0), TrialPlan(trials=5_000, master_seed=3))
        assert row.bit_errors == 0
        assert row.ber_mc == 0.0

    def test_bits_accounting(self):
        row = simulate_abep(CFG_SMALL, LinkBudget(10.0), TrialPlan(trials=1_000, master_seed=3))
        assert row.bits_sent == 1_000 * CFG_SMALL.bits_per_use
        assert row.ber_mc == row.bit_errors / row.bits_sent

    def test_matches_union_bound_loosely(self):
        from ris_ssm.analytics import abep_union

        budget = LinkBudget(14.0)
        row = simulate_abep(CFG_SMALL, budget, TrialPlan(trials=400_000, master_seed=9))
        bound = abep_union(CFG_SMALL, budget, "mgf")
        assert 0.3 * bound < row.ber_mc < 1.1 * bound

    def test_early_stop_respects_threshold_and_determinism(self):
        budget = LinkBudget(0.0)
        plan1 = TrialPlan(trials=500_000, master_seed=4, early_stop_errors=2_000, batch_size=4096)
        plan8 = TrialPlan(
            trials=500_000, master_seed=4, early_stop_errors=2_000, batch_size=4096, workers=8
        )
        a = simulate_abep(CFG_SMALL, budget, plan1)
        b = simulate_abep(CFG_SMALL, budget, plan8)
        assert a.bit_errors >= 2_000
        assert a.bits_sent < 500_000 * CFG_SMALL.bits_per_use
        assert (a.bit_errors, a.bits_sent) == (b.bit_errors, b.bits_sent)

    def test_trace_dump_is_consistent_with_error_count(self, tmp_path):
        path = tmp_path / "trace.tsv"
        plan = TrialPlan(trials=500, master_seed=6, trace_path=str(path))
        row = simulate_abep(CFG_SMALL, LinkBudget(6.0), plan)
        lines = path.read_text().splitlines()
        assert len(lines) == 500
        total = 0
        for line in lines:
            trial, l, m, l_hat, m_hat = (int(f) for f in line.split("\t"))
            assert 0 <= trial < 500
            assert 1 <= l <= 2 and 1 <= l_hat <= 2
            assert 1 <= m <= 2 and 1 <= m_hat <= 2
            total += hamming_distance(l, m, l_hat, m_hat, CFG_SMALL)
        assert total == row.bit_errors


class TestDetectorMatchesCpep:
    """Two-hypothesis detection rates against the conditional error formulas."""

    def _branch_noise(self, rng, n, n0):
        return math.sqrt(n0 / 2.0) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))

    def test_correct_beam_branch(self):
        rng = np.random.default_rng(2)
        rho, n0 = 6.0, 1.0 / 6.0
        h = 0.9 - 0.35j
        s, s_hat = 1.0, -1.0
        trials = 100_000
        y = h * s + self._branch_noise(rng, trials, n0)
        wrong = np.abs(y - h * s) ** 2 > np.abs(y - h * s_hat) ** 2
        rate = wrong.mean()
        expected = cpep_correct_beam(rho, abs(h) ** 2, abs(s - s_hat) ** 2)
        se = math.sqrt(expected * (1 - expected) / trials)
        assert abs(rate - expected) <= 3 * se

    def test_wrong_beam_branch(self):
        rng = np.random.default_rng(8)
        rho, n0 = 4.0, 0.25
        h_l, h_hat = 0.8 + 0.1j, -0.2 + 0.6j
        s, s_hat = 1.0, -1.0
        trials = 100_000
        n_l = self._branch_noise(rng, trials, n0)
        n_hat = self._branch_noise(rng, trials, n0)
        y_l = h_l * s + n_l
        y_hat = n_hat
        wrong = np.abs(y_l - h_l * s) ** 2 > np.abs(y_hat - h_hat * s_hat) ** 2
        rate = wrong.mean()
        expected = cpep_wrong_beam(rho, abs(h_hat) ** 2, abs(s_hat) ** 2)
        se = math.sqrt(expected * (1 - expected) / trials)
        assert abs(rate - expected) <= 3 * se


class TestCapacityEstimator:
    def test_matches_formula_small_config(self):
        cfg = make_config(2, 2, "psk", 2)
        budget = LinkBudget.from_rho(10.0)
        mc = simulate_capacity(cfg, budget, TrialPlan(trials=1_000_000, master_seed=5))
        lb = ergodic_capacity_lb(cfg, budget, "exact_mgf")
        assert abs(mc - lb) <= 0.03

    def test_high_snr_plateau(self):
        cfg = make_config(6, 4, "psk", 4)
        mc = simulate_capacity(cfg, LinkBudget(60.0), TrialPlan(trials=50_000, master_seed=5))
        assert mc == pytest.approx(4.0, abs=1e-6)

    def test_increments_shrink_with_candidate_count(self):
        budget = LinkBudget(24.0)
        values = []
        for l_s in range(1, 9):
            cfg = make_config(18, l_s, "psk", 4)
            values.append(
                simulate_capacity(cfg, budget, TrialPlan(trials=200_000, master_seed=l_s))
            )
        increments = np.diff(values)
        assert np.all(increments > 0)
        assert np.all(np.diff(increments) < 0)


class TestBenchmarks:
    def test_max_beam_beats_min_beam(self):
        cfg = make_config(12, 1, "qam", 16)
        for snr in (8.0, 14.0):
            budget = LinkBudget(snr)
            plan = TrialPlan(trials=60_000, master_seed=11)
            b_max = simulate_benchmark(cfg, budget, plan, "max")
            b_min = simulate_benchmark(cfg, budget, plan, "min")
            assert b_max.ber_mc <= b_min.ber_mc

    def test_noiseless_benchmarks_error_free(self):
        cfg = make_config(6, 1, "qam", 16)
        plan = TrialPlan(trials=4_000, master_seed=12)
        for which in ("max", "min"):
            assert simulate_benchmark(cfg, LinkBudget(300.0), plan, which).bit_errors == 0

    def test_sorted_scheme_beats_benchmarks_with_rich_scattering(self):
        # at matched 4 bit/s/Hz and L = 12, sorted selection wins at high SNR
        budget = LinkBudget(16.0)
        plan = TrialPlan(trials=300_000, master_seed=13)
        ssm = simulate_abep(make_config(12, 4, "psk", 4), budget, plan)
        bench = make_config(12, 1, "qam", 16)
        b_max = simulate_benchmark(bench, budget, plan, "max")
        b_min = simulate_benchmark(bench, budget, plan, "min")
        assert ssm.ber_mc < b_max.ber_mc < b_min.ber_mc

    def test_requires_single_candidate_config(self):
        with pytest.raises(ValueError):
            simulate_benchmark(CFG_SMALL, LinkBudget(10.0), TrialPlan(trials=10), "max")


class TestRandomSelection:
    def test_same_law_when_all_scatterers_used(self):
        cfg = make_config(2, 2, "psk", 2)
        budget = LinkBudget(8.0)
        trials = 300_000
        a = simulate_abep(cfg, budget, TrialPlan(trials=trials, master_seed=21))
        b = simulate_random_selection(cfg, budget, TrialPlan(trials=trials, master_seed=22))
        se = math.sqrt(2 * a.ber_mc * (1 - a.ber_mc) / a.bits_sent)
        assert abs(a.ber_mc - b.ber_mc) <= 3 * se

    def test_sorting_gain_is_large(self):
        budget = LinkBudget(12.0)
        plan = TrialPlan(trials=150_000, master_seed=23)
        sorted_row = simulate_abep(CFG_SMALL, budget, plan)
        random_row = simulate_random_selection(CFG_SMALL, budget, plan)
        assert sorted_row.ber_mc < 0.5 * random_row.ber_mc


class TestFullArrayMode:
    def test_tracks_abstract_model(self):
        budget = LinkBudget(4.0)
        abstract = simulate_abep(CFG_SMALL, budget, TrialPlan(trials=4_000, master_seed=31))
        full = simulate_abep(
            CFG_SMALL, budget, TrialPlan(trials=4_000, master_seed=31, mode="full_array")
        )
        assert abs(full.ber_mc - abstract.ber_mc) / abstract.ber_mc < 0.15

    def test_random_selection_rejects_full_array(self):
        with pytest.raises(ValueError):
            simulate_random_selection(
                CFG_SMALL, LinkBudget(10.0), TrialPlan(trials=10, mode="full_array")
            )


class TestPlanValidation:
    def test_scheme_dispatch(self):
        budget = LinkBudget(10.0)
        for scheme in ("ris_ssm_sorted", "ris_ssm_random"):
            row = run_ber_point(CFG_SMALL, budget, TrialPlan(trials=2_000, master_seed=1, scheme=scheme))
            assert row.series == scheme
        bench = make_config(4, 1, "qam", 16)
        row = run_ber_point(bench, budget, TrialPlan(trials=2_000, master_seed=1, scheme="benchmark_min_beam"))
        assert row.series == "benchmark_min_beam"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"trials": 0},
            {"mode": "hybrid"},
            {"scheme": "mrc"},
            {"workers": 0},
            {"master_seed": -1},
            {"angle_domain": "hemisphere"},
        ],
    )
    def test_invalid_plans_rejected(self, kwargs):
        with pytest.raises(ValueError):
            TrialPlan(**kwargs)

    def test_sweep_result_defaults(self):
        row = SweepResult()
        assert row.ber_mc is None and row.capacity_mc is None
