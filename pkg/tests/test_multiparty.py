import math

import numpy as np
import pytest

from qcoinflip.multiparty import (
    ADVERSARY_PRESETS,
    BIN_STRATEGIES,
    AdversaryModel,
    TournamentConfig,
    aggressive_adversary,
    cheat_win_cap,
    combined_bias,
    committee_threshold,
    expected_fix_probability,
    honest_adversary,
    lightest_bin_select,
    naive_fix_probability,
    naive_tournament_bound,
    recurrence_step,
    simulate_tournament,
    survival_product_constant,
    timid_adversary,
    tournament_bound,
    tournament_constant,
)
from qcoinflip.quantum import as_rng

# frozen via an independent 400-term truncation of the survival product
SURVIVAL_CONSTANT = 0.0298533420561977


class TestRecurrence:
    def test_round_with_penalty_seven(self):
        q = 0.5 + 1 / math.sqrt(7)
        out = recurrence_step(63 / 64, q)
        assert abs(out - (1 - (1 / 64) * (0.5 - 1 / math.sqrt(7)))) < 1e-15

    def test_no_cheating_power(self):
        assert recurrence_step(0.75, 0.0) == 0.75

    def test_total_cheating_power(self):
        assert recurrence_step(0.25, 1.0) == 1.0

    def test_monotone_in_both_arguments(self):
        grid = np.linspace(0.0, 1.0, 9)
        for p1 in grid:
            for p2 in grid:
                if p1 <= p2:
                    for q in grid:
                        assert recurrence_step(p1, q) <= recurrence_step(p2, q) + 1e-15
                        assert recurrence_step(q, p1) <= recurrence_step(q, p2) + 1e-15

    def test_range_validation(self):
        with pytest.raises(ValueError):
            recurrence_step(1.5, 0.5)


class TestTournamentBound:
    def test_eight_players_exact(self):
        not_fixed, bias = tournament_bound(8)
        assert not_fixed == 1 / 64
        assert bias == 0.5 - 1 / 64

    def test_survival_constant(self):
        value = survival_product_constant()
        assert value > 0
        assert abs(value - SURVIVAL_CONSTANT) < 1e-10
        # truncation is converged: pushing the tolerance changes nothing visible
        assert abs(value - survival_product_constant(1e-14)) < 1e-10

    def test_scaled_margin_bounded_below_up_to_2_20(self):
        c = tournament_constant()
        assert c > 0
        for n in range(3, 21):
            k = 2**n
            not_fixed, bias = tournament_bound(k)
            assert k * not_fixed >= c - 1e-15
            assert bias <= 0.5 - c / k + 1e-15

    def test_rejects_bad_player_counts(self):
        for k in (4, 6, 12, 100):
            with pytest.raises(ValueError):
                tournament_bound(k)


class TestNaiveBound:
    def test_two_players(self):
        assert abs(naive_tournament_bound(2) - 0.25) < 1e-15

    def test_k1024_comparison(self):
        assert naive_fix_probability(1024) <= 1 - 1 / (4 * 1024**1.78)

    def test_monotone_closed_form_comparison(self):
        for k in (2, 3, 8, 50, 400, 1 << 14):
            assert naive_fix_probability(k) <= 1 - 1 / (4 * k**1.78) + 1e-15

    def test_margin_weakly_decreasing(self):
        # the defence margin 1/2 - bias shrinks monotonically as the
        # elimination exponent grows
        margins = [0.5 - naive_tournament_bound(k) for k in range(2, 600)]
        assert all(a >= b - 1e-15 for a, b in zip(margins, margins[1:]))


class TestAdversaries:
    def test_simplex_validation(self):
        with pytest.raises(ValueError):
            AdversaryModel(0.5, 0.6, 0.1)

    def test_payoff_cap_enforced(self):
        bad = AdversaryModel(0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            bad.check_admissible(7.0)

    def test_presets_admissible_for_all_rounds(self):
        for n in (3, 4, 5, 6, 10):
            config = TournamentConfig(n)
            for i in range(config.penalty_rounds):
                v = config.penalty_schedule[i]
                for preset in ADVERSARY_PRESETS.values():
                    preset(v).check_admissible(v)

    def test_timid_saturates_cap(self):
        model = timid_adversary(7.0)
        assert abs(model.p_lose - cheat_win_cap(7.0)) < 1e-12
        assert model.p_catch == 0.0


class TestSimulation:
    def test_schedule(self):
        config = TournamentConfig.for_players(32)
        assert config.penalty_schedule == (15, 7, 3, 1, 0)
        assert config.penalty_rounds == 2

    def test_monte_carlo_matches_closed_form(self):
        runs = 100_000
        for k in (8, 16, 64):
            config = TournamentConfig.for_players(k)
            for name, preset in ADVERSARY_PRESETS.items():
                report = simulate_tournament(config, 0, preset, as_rng(17), runs)
                exact = expected_fix_probability(config, preset)
                assert abs(report.mc_estimate - exact) <= 4 * report.stderr, (k, name)

    def test_never_beats_analytic_bound(self):
        runs = 50_000
        for k in (8, 16, 32):
            config = TournamentConfig.for_players(k)
            bound = 1.0 - tournament_bound(k)[0]
            for name, preset in ADVERSARY_PRESETS.items():
                report = simulate_tournament(config, 0, preset, as_rng(29), runs)
                assert report.mc_estimate <= bound + 4 * report.stderr, (k, name)

    def test_always_catch_adversary_never_fixes(self):
        config = TournamentConfig.for_players(32)
        catcher = AdversaryModel(0.0, 0.0, 1.0)
        report = simulate_tournament(config, 0, catcher, as_rng(3), 20_000)
        # honest survives both penalty rounds via catches; only the final
        # phase rounds remain fixable
        assert abs(report.mc_estimate - 0.0) < 1e-12

    def test_honest_preset_closed_form(self):
        # honest survives each penalty round with probability 1/2, then the
        # abstract finish fails with probability (1/4)^3
        for k in (8, 16, 32):
            config = TournamentConfig.for_players(k)
            n = int(math.log2(k))
            expected = 1 - 0.5 ** (n - 3) * (1 / 64)
            assert abs(expected_fix_probability(config, honest_adversary) - expected) < 1e-12

    def test_rejects_inadmissible(self):
        config = TournamentConfig.for_players(16)
        greedy = AdversaryModel(0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            simulate_tournament(config, 0, greedy, as_rng(0), 10)


class TestLightestBin:
    def test_all_honest_committee(self):
        result = lightest_bin_select(64, 64, 2, 8, as_rng(5))
        assert len(result.committee) <= 8
        assert result.honest_members == result.committee

    def test_tiny_instance_skips_selection(self):
        result = lightest_bin_select(2, 1, 2, 2, as_rng(0))
        assert result.committee == (0, 1)
        assert result.rounds == 0

    def test_single_round_size_cannot_exceed_mean(self):
        for seed in range(100):
            for strategy in BIN_STRATEGIES.values():
                result = lightest_bin_select(63, 20, 2, 32, as_rng(seed), strategy)
                assert len(result.committee) <= math.ceil(63 / 2)

    def test_honest_presence_rate_against_presets(self):
        threshold = committee_threshold(256, 64)
        assert threshold == 16
        seeds = 1500
        for name, strategy in BIN_STRATEGIES.items():
            hits = sum(
                bool(lightest_bin_select(256, 64, 2, threshold, as_rng(seed), strategy).honest_members)
                for seed in range(seeds)
            )
            rate = hits / seeds
            sigma = math.sqrt(0.25 / seeds)
            assert rate >= 0.5 - 4 * sigma, name


class TestCombinedBias:
    def test_single_honest_matches_tournament(self):
        bias, committee = combined_bias(64, 1)
        assert committee is None
        assert abs(bias - tournament_bound(64)[1]) < 1e-15

    def test_all_honest_constant_bound(self):
        biases = {k: combined_bias(k, k)[0] for k in (16, 256, 4096)}
        assert len(set(biases.values())) == 1
        assert biases[16] <= 0.5 - 1 / 128

    def test_linear_in_g_over_k(self):
        ratios = []
        for n in (4, 6, 8, 10, 12):
            k = 2**n
            for g in sorted({1, k // 8, k // 4, k // 2}):
                bias, _ = combined_bias(k, g)
                ratios.append((0.5 - bias) * k / g)
        assert min(ratios) > 0
        # a single constant c' works across the whole sweep
        assert min(ratios) > 1e-4
