"""Tests for the closed-form error-rate, capacity and throughput expressions."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erfc

from ris_ssm.analytics import (
    LinkBudget,
    abep_union,
    capacity_lower_bound,
    cpep_correct_beam,
    cpep_wrong_beam,
    diversity_gain,
    ergodic_capacity_lb,
    qapprox_form_gap,
    system_throughput,
    upep_asymptotic_correct,
    upep_asymptotic_wrong,
    upep_mgf_correct,
    upep_mgf_wrong,
    upep_pdf_correct,
    upep_pdf_wrong,
    upep_qapprox_compact,
    upep_qapprox_correct,
)
from ris_ssm.modulation import error_events, make_config
from ris_ssm.orderstats import OrderedGainLaw, ordered_pdf


def q_ref(x: float) -> float:
    return 0.5 * erfc(x / math.sqrt(2.0))


def quad_correct(l: int, l_total: int, r: float) -> float:
    """Numerical average of the Gaussian-tail error over the rank law."""
    law = OrderedGainLaw(l, l_total)
    value, _ = quad(
        lambda x: ordered_pdf(law, x) * q_ref(math.sqrt(r * x / 2.0)), 0.0, 80.0, limit=300
    )
    return value


def quad_wrong(l_hat: int, l_total: int, r: float) -> float:
    """Numerical average of the exponential error over the rank law."""
    law = OrderedGainLaw(l_hat, l_total)
    value, _ = quad(
        lambda x: 0.5 * ordered_pdf(law, x) * math.exp(-r * x / 2.0), 0.0, 80.0, limit=300
    )
    return value


class TestLinkBudget:
    def test_snr_definition(self):
        budget = LinkBudget(10.0)
        assert budget.rho == pytest.approx(10.0)
        assert budget.n0 == pytest.approx(0.1)

    def test_from_rho_roundtrip(self):
        budget = LinkBudget.from_rho(316.2)
        assert budget.rho == pytest.approx(316.2, rel=1e-12)

    def test_from_rho_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            LinkBudget.from_rho(0.0)


class TestCpep:
    def test_half_at_zero_snr(self):
        assert cpep_correct_beam(0.0, 1.3, 2.0) == pytest.approx(0.5)
        assert cpep_wrong_beam(0.0, 1.3, 1.0) == pytest.approx(0.5)

    def test_correct_beam_reference_value(self):
        assert cpep_correct_beam(2.0, 1.0, 2.0) == pytest.approx(q_ref(math.sqrt(2.0)), abs=1e-12)

    def test_wrong_beam_reference_value(self):
        # exponent rho |h|^2 |s|^2 = 2 gives exp(-1)/2
        assert cpep_wrong_beam(2.0, 1.0, 1.0) == pytest.approx(0.1839397, abs=1e-7)

    def test_monotone_in_each_argument(self):
        base = cpep_correct_beam(4.0, 1.0, 2.0)
        assert cpep_correct_beam(8.0, 1.0, 2.0) < base
        assert cpep_correct_beam(4.0, 2.0, 2.0) < base
        assert cpep_correct_beam(4.0, 1.0, 4.0) < base

    def test_wrong_beam_ignores_transmitted_symbol(self):
        # no dependence on the true symbol enters the formula
        assert cpep_wrong_beam(3.0, 0.7, 1.0) == cpep_wrong_beam(3.0, 0.7, 1.0)

    def test_rejects_negative_arguments(self):
        with pytest.raises(ValueError):
            cpep_correct_beam(-1.0, 1.0, 1.0)


class TestExactUpep:
    def test_single_path_hand_value(self):
        # (1/2)(1 - 1/sqrt(2)) for rho delta^2 = 4
        assert upep_pdf_correct(1.0, 1, 1, 4.0) == pytest.approx(0.5 * (1 - 1 / math.sqrt(2)), abs=1e-12)
        assert upep_pdf_correct(1.0, 1, 1, 4.0) == pytest.approx(0.146447, abs=1e-6)

    def test_correct_beam_against_quadrature(self):
        value = upep_pdf_correct(10.0, 1, 2, 4.0)
        assert value == pytest.approx(quad_correct(1, 2, 40.0), abs=1e-6)
        assert value == pytest.approx(0.0029729, abs=1e-6)

    def test_zero_snr_limit_is_half(self):
        for l, l_total in ((1, 1), (1, 4), (3, 5)):
            assert upep_pdf_correct(0.0, l, l_total, 4.0) == pytest.approx(0.5, abs=1e-12)
            assert upep_mgf_correct(0.0, l, l_total, 4.0) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize(
        "rho,l_hat,l_total,expected",
        [(2.0, 1, 1, 0.25), (10.0, 1, 2, 1.0 / 42.0), (10.0, 2, 2, 1.0 / 7.0)],
    )
    def test_wrong_beam_hand_values(self, rho, l_hat, l_total, expected):
        assert upep_pdf_wrong(rho, l_hat, l_total, 1.0) == pytest.approx(expected, rel=1e-12)
        assert upep_mgf_wrong(rho, l_hat, l_total, 1.0) == pytest.approx(expected, rel=1e-12)

    def test_wrong_beam_product_vs_alternating_sum(self):
        # 2! (1/4 - 1/6) = 1/6 cross-checks the product (1/2)(2/4)(4/6)
        assert upep_mgf_wrong(2.0, 1, 2, 1.0) == pytest.approx(1.0 / 6.0, rel=1e-12)

    def test_wrong_beam_against_quadrature(self):
        assert upep_pdf_wrong(10.0, 1, 3, 1.0) == pytest.approx(quad_wrong(1, 3, 10.0), abs=1e-8)

    def test_partial_fraction_single_term_case(self):
        # l = L collapses the product: (1/2)(1 - sqrt(c/(1+c))), c = rho d^2/(4L)
        c = 5.0
        assert upep_mgf_correct(10.0, 2, 2, 4.0) == pytest.approx(
            0.5 * (1 - math.sqrt(c / (1 + c))), rel=1e-12
        )
        assert upep_mgf_correct(10.0, 2, 2, 4.0) == pytest.approx(0.0435645, abs=1e-7)

    def test_cross_method_identity_spot_grid(self):
        for l_total in (1, 3, 7, 12):
            for l in range(1, l_total + 1):
                for rho in (0.01, 1.0, 100.0, 1e4):
                    a = upep_pdf_correct(rho, l, l_total, 2.0)
                    b = upep_mgf_correct(rho, l, l_total, 2.0)
                    assert abs(a - b) / b <= 1e-9
                    a = upep_pdf_wrong(rho, l, l_total, 1.0)
                    b = upep_mgf_wrong(rho, l, l_total, 1.0)
                    assert abs(a - b) / b <= 1e-9

    def test_decreasing_in_snr(self):
        values = [upep_mgf_correct(r, 2, 4, 2.0) for r in (0.1, 1.0, 10.0, 100.0)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_deep_cancellation_domain(self):
        # at L = 30 and high SNR the result sits ~130 orders below the
        # summands; the adaptive-precision roots must keep both routes
        # on the true value (cross-checked against 300-digit arithmetic)
        a = upep_pdf_correct(1.0, 1, 30, 1e6)
        b = upep_mgf_correct(1.0, 1, 30, 1e6)
        assert a > 0 and abs(a - b) / b <= 1e-9
        assert b == pytest.approx(1.565633e-131, rel=1e-6)
        ratio = upep_asymptotic_correct(1.0, 1, 12, 1e8) / upep_mgf_correct(1.0, 1, 12, 1e8)
        assert 1.0 <= ratio <= 1.0001

    def test_same_symbol_pairs_rejected(self):
        with pytest.raises(ValueError):
            upep_pdf_correct(1.0, 1, 2, 0.0)
        with pytest.raises(ValueError):
            upep_mgf_correct(1.0, 1, 2, 0.0)

    def test_rank_validation(self):
        with pytest.raises(ValueError):
            upep_pdf_correct(1.0, 3, 2, 1.0)


class TestQApproxUpep:
    def test_single_path_hand_value(self):
        assert upep_qapprox_correct(1.0, 1, 1, 4.0) == pytest.approx(1 / 24 + 3 / 28, rel=1e-12)

    def test_zero_snr_bias(self):
        # the two-exponential form starts at 1/12 + 1/4, not 1/2
        assert upep_qapprox_correct(0.0, 1, 3, 4.0) == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_rank_one_tracks_or_exceeds_exact(self):
        # on the strongest-rank law the approximation never undershoots
        # the exact average by more than 10 percent on this surface
        for l_total in range(1, 9):
            for r in np.geomspace(1.0, 100.0, 25):
                approx = upep_qapprox_correct(1.0, 1, l_total, float(r))
                exact = upep_mgf_correct(1.0, 1, l_total, float(r))
                assert approx >= exact * 0.90

    def test_full_grid_undershoot_envelope(self):
        # weaker ranks at small rho delta^2 inherit the known low-argument
        # bias of the two-exponential form; measured worst case is ~22%
        worst = 0.0
        for l_total in range(1, 9):
            for l in range(1, l_total + 1):
                for r in np.geomspace(1.0, 100.0, 25):
                    approx = upep_qapprox_correct(1.0, l, l_total, float(r))
                    exact = upep_mgf_correct(1.0, l, l_total, float(r))
                    worst = min(worst, approx / exact - 1.0)
        assert worst >= -0.25

    def test_compact_form_matches_only_single_factor(self):
        assert upep_qapprox_compact(7.0, 3, 3, 2.0) == pytest.approx(
            upep_qapprox_correct(7.0, 3, 3, 2.0), rel=1e-12
        )
        gap = qapprox_form_gap(7.0, 1, 3, 2.0)
        assert gap["relative_gap"] > 1e-3
        assert gap["two_product"] != gap["single_product"]


class TestAsymptoticUpep:
    def test_correct_beam_hand_value(self):
        assert upep_asymptotic_correct(1.0, 1, 1, 4.0) == pytest.approx(0.25, rel=1e-12)

    def test_wrong_beam_hand_value(self):
        assert upep_asymptotic_wrong(2.0, 1, 1, 1.0) == pytest.approx(0.5, rel=1e-12)

    def test_ratio_to_exact_approaches_one(self):
        r = upep_asymptotic_correct(2500.0, 1, 2, 4.0) / upep_mgf_correct(2500.0, 1, 2, 4.0)
        assert 1.0 <= r <= 1.2

    def test_dominates_exact_everywhere(self):
        for rho in (0.1, 1.0, 10.0, 1e3):
            assert upep_asymptotic_correct(rho, 2, 5, 2.0) >= upep_mgf_correct(rho, 2, 5, 2.0)
            assert upep_asymptotic_wrong(rho, 2, 5, 1.0) >= upep_mgf_wrong(rho, 2, 5, 1.0)

    def test_pure_power_law_slope(self):
        # log10 of each branch is affine in SNR(dB) with slope -(L-l+1)/10
        for l, l_total in ((1, 4), (2, 4), (4, 4)):
            l_dot = l_total - l + 1
            snrs = np.array([30.0, 40.0, 50.0, 60.0])
            logs = [
                math.log10(upep_asymptotic_correct(10 ** (s / 10), l, l_total, 2.0)) for s in snrs
            ]
            slopes = np.diff(logs) / np.diff(snrs)
            np.testing.assert_allclose(slopes, -l_dot / 10.0, rtol=1e-12)

    def test_may_exceed_one_at_low_snr(self):
        assert upep_asymptotic_correct(0.01, 1, 4, 0.5) > 1.0


class TestAbepUnion:
    def test_hand_value_two_by_two_bpsk(self):
        cfg = make_config(2, 2, "psk", 2)
        budget = LinkBudget.from_rho(10.0)
        assert abep_union(cfg, budget, "mgf") == pytest.approx(0.136634, abs=1e-6)

    def test_against_pair_enumeration_oracle(self):
        cfg = make_config(2, 2, "psk", 2)
        budget = LinkBudget.from_rho(10.0)
        total = 0.0
        for ev in error_events(cfg):
            if ev.hamming == 0:
                continue
            if ev.l_hat == ev.l:
                p = quad_correct(ev.l, 2, budget.rho * ev.delta_sq)
            else:
                p = quad_wrong(ev.l_hat, 2, budget.rho * ev.energy_hat)
            total += p * ev.hamming
        expected = total / (2 * 2 * 2)
        assert abep_union(cfg, budget, "mgf") == pytest.approx(expected, abs=1e-6)

    def test_methods_agree(self):
        cfg = make_config(6, 4, "psk", 4)
        for snr in (0.0, 10.0, 25.0):
            budget = LinkBudget(snr)
            a = abep_union(cfg, budget, "pdf")
            b = abep_union(cfg, budget, "mgf")
            assert abs(a - b) / b <= 1e-9

    def test_vanishes_at_high_snr(self):
        cfg = make_config(4, 2, "psk", 2)
        assert abep_union(cfg, LinkBudget(80.0), "mgf") < 1e-12

    def test_asymptotic_dominates_bound_at_high_snr(self):
        cfg = make_config(4, 2, "psk", 2)
        for snr in (15.0, 20.0, 30.0):
            budget = LinkBudget(snr)
            assert abep_union(cfg, budget, "asymptotic") >= abep_union(cfg, budget, "mgf")

    def test_qam_wrong_beam_uses_per_symbol_energy(self):
        cfg = make_config(4, 2, "qam", 16)
        value = abep_union(cfg, LinkBudget(12.0), "mgf")
        assert 0.0 < value < 1.0

    def test_unknown_method_rejected(self):
        cfg = make_config(2, 2, "psk", 2)
        with pytest.raises(ValueError):
            abep_union(cfg, LinkBudget(10.0), "exact")


class TestDiversityGain:
    @pytest.mark.parametrize("l_total,l_s,expected", [(6, 4, 3), (12, 4, 9), (1, 1, 1)])
    def test_values(self, l_total, l_s, expected):
        assert diversity_gain(l_total, l_s) == expected

    def test_rejects_l_s_above_l_total(self):
        with pytest.raises(ValueError):
            diversity_gain(2, 3)


class TestCapacity:
    def test_high_snr_plateau(self):
        cfg = make_config(6, 4, "psk", 4)
        budget = LinkBudget(120.0)
        for variant in ("exact_mgf", "paper_asymptotic"):
            assert ergodic_capacity_lb(cfg, budget, variant) == pytest.approx(4.0, abs=1e-9)

    def test_asymptotic_variant_hand_value(self):
        # inner sum is 2*(2*0.2) + 2*(2*0.04) = 0.96, so C = 4 - log2(4.96)
        cfg = make_config(2, 2, "psk", 2)
        value = ergodic_capacity_lb(cfg, LinkBudget.from_rho(10.0), "paper_asymptotic")
        assert value == pytest.approx(4.0 - math.log2(4.96), abs=1e-12)
        assert value == pytest.approx(1.6897, abs=1e-3)

    def test_exact_variant_stays_in_range(self):
        for l_total, l_s, order in ((2, 2, 2), (6, 4, 4), (12, 8, 8), (18, 8, 8)):
            cfg = make_config(l_total, l_s, "psk", order)
            top = math.log2(l_s * order)
            for snr in (-10.0, 0.0, 10.0, 25.0, 60.0):
                value = ergodic_capacity_lb(cfg, LinkBudget(snr), "exact_mgf")
                assert 0.0 <= value <= top + 1e-12

    def test_asymptotic_variant_can_go_negative(self):
        cfg = make_config(12, 4, "psk", 4)
        assert ergodic_capacity_lb(cfg, LinkBudget(-30.0), "paper_asymptotic") < 0.0

    def test_non_power_of_two_candidate_counts(self):
        # candidate sweeps hit l_s values with no integer bit mapping
        energies = make_config(18, 1, "psk", 4).constellation.energies
        values = [
            capacity_lower_bound(18, l_s, energies, 10 ** 2.4, "exact_mgf")
            for l_s in range(1, 9)
        ]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_plateau_across_alphabets(self):
        # both variants reach log2(L_s M) within 0.01 bits by rho = 1e6
        budget = LinkBudget(60.0)
        for l_total in (6, 12, 18):
            for l_s in (2, 4, 8):
                if l_s > l_total:
                    continue
                for order in (2, 4, 8):
                    cfg = make_config(l_total, l_s, "psk", order)
                    top = math.log2(l_s * order)
                    for variant in ("exact_mgf", "paper_asymptotic"):
                        value = ergodic_capacity_lb(cfg, budget, variant)
                        assert abs(value - top) <= 0.01

    def test_monotone_in_l_total(self):
        # richer scattering gives the sorted candidates better gains
        for variant in ("exact_mgf",):
            values = [
                ergodic_capacity_lb(make_config(L, 4, "psk", 4), LinkBudget(5.0), variant)
                for L in (6, 12, 18)
            ]
            assert all(a < b for a, b in zip(values, values[1:]))

    def test_unknown_variant_rejected(self):
        cfg = make_config(2, 2, "psk", 2)
        with pytest.raises(ValueError):
            ergodic_capacity_lb(cfg, LinkBudget(10.0), "upper")


class TestThroughput:
    def test_error_free_rate(self):
        assert system_throughput(0.0, make_config(4, 4, "psk", 4)) == pytest.approx(4.0)

    def test_half_errors(self):
        assert system_throughput(0.5, make_config(2, 2, "psk", 2)) == pytest.approx(1.0)

    def test_follows_union_bound_to_capacity_plateau(self):
        cfg = make_config(4, 2, "psk", 2)
        abep = abep_union(cfg, LinkBudget(60.0), "mgf")
        assert system_throughput(abep, cfg) == pytest.approx(2.0, abs=1e-9)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            system_throughput(1.5, make_config(2, 2, "psk", 2))
