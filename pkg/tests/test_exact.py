"""Transfer engine: partition sums, marginals, block events, run lengths."""

from __future__ import annotations

import math

import numpy as np
import pytest

from spinchain import (
    Block,
    CouplingProfile,
    Volume,
    block_probability,
    enumerate_all,
    enumerate_blocks,
    log_partition,
    magnetization_gap,
    max_run_distribution,
    max_run_tail,
    origin_minus_upper_bound,
    run_capped_log_partition,
    run_length_threshold,
    site_marginal,
)
from spinchain.exact import NEG_INF, log_add, log_sum
from conftest import log_close, rel_close, standard_profiles


class TestLogWeights:
    def test_log_add_matches_direct_sum(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            a, b = rng.uniform(-700, 100, size=2)
            direct = math.log(math.exp(a) + math.exp(b)) if max(a, b) < 700 else None
            assert rel_close(log_add(a, b), np.logaddexp(a, b), 1e-14)
            if direct is not None:
                assert rel_close(log_add(a, b), direct, 1e-12)

    def test_zero_weight_identity(self):
        assert log_add(NEG_INF, NEG_INF) == NEG_INF
        assert log_add(NEG_INF, 2.5) == 2.5
        assert log_add(2.5, NEG_INF) == 2.5

    def test_commutative_and_associative_within_tolerance(self):
        rng = np.random.default_rng(12)
        values = rng.uniform(-50, 50, size=60)
        for a, b in zip(values[::2], values[1::2]):
            assert log_add(a, b) == log_add(b, a)  # exact by construction
        triples = rng.uniform(-50, 50, size=(40, 3))
        for a, b, c in triples:
            left = log_add(log_add(a, b), c)
            right = log_add(a, log_add(b, c))
            assert rel_close(left, right, 1e-12)

    def test_multiplication_is_exact_log_addition(self):
        # weight product == log sum, no rounding beyond float addition
        assert log_sum([NEG_INF]) == NEG_INF
        assert 1.5 + 2.25 == 3.75


class TestLogPartition:
    def test_fully_pinned_aligned_configuration(self, profiles):
        vol = Volume(2)
        cons = {x: 1 for x in vol.sites()}
        for prof in profiles.values():
            assert log_partition(prof, vol, 1.0, 1, cons) == 0.0

    def test_free_spins_give_counting_entropy(self):
        prof = CouplingProfile.constant(0.0)
        for n in (0, 1, 4):
            vol = Volume(n)
            for boundary in (1, -1):
                got = log_partition(prof, vol, 1.0, boundary)
                assert log_close(got, vol.size * math.log(2.0))

    def test_small_volume_matches_eight_term_sum(self):
        z = 1 + 2 * math.exp(-1) + 2 * math.exp(-2) + 2 * math.exp(-3) + math.exp(-4)
        got = log_partition(CouplingProfile.absolute(), Volume(1), 1.0, 1)
        assert log_close(got, math.log(z))

    def test_inputs_validated(self):
        prof = CouplingProfile.absolute()
        vol = Volume(1)
        with pytest.raises(ValueError):
            log_partition(prof, vol, 0.0, 1)
        with pytest.raises(ValueError):
            log_partition(prof, vol, math.inf, 1)
        with pytest.raises(ValueError):
            log_partition(prof, vol, 1.0, 0)
        with pytest.raises(ValueError):
            log_partition(prof, vol, 1.0, 1, {5: 1})
        with pytest.raises(ValueError):
            log_partition(prof, vol, 1.0, 1, {0: 2})

    def test_deterministic(self):
        prof = CouplingProfile.linear(0.5, 1.5)
        vol = Volume(40)
        first = log_partition(prof, vol, 2.0, 1)
        assert all(log_partition(prof, vol, 2.0, 1) == first for _ in range(3))


class TestSiteMarginal:
    def test_free_spins_are_fair(self):
        prof = CouplingProfile.constant(0.0)
        for beta in (0.5, 3.0):
            for site in (-2, 0, 1):
                got = site_marginal(prof, Volume(2), beta, 1, site, -1)
                assert rel_close(got, 0.5)

    def test_matches_oracle(self, profiles):
        vol = Volume(2)
        for prof in profiles.values():
            result = enumerate_all(prof, vol, 1.0, 1)
            for site in vol.sites():
                got = site_marginal(prof, vol, 1.0, 1, site, -1)
                assert rel_close(got, result.minus_marginals[site])

    def test_normalization(self, profiles):
        for prof in profiles.values():
            for n in (0, 2, 4):
                vol = Volume(n)
                for beta in (0.25, 2.0):
                    for site in vol.sites():
                        total = site_marginal(prof, vol, beta, 1, site, 1) + site_marginal(
                            prof, vol, beta, 1, site, -1
                        )
                        assert abs(total - 1.0) <= 1e-12

    def test_monotone_decrease_in_beta_at_origin(self):
        prof = CouplingProfile.absolute()
        for n in (2, 8):
            vol = Volume(n)
            assert site_marginal(prof, vol, 5.0, 1, 0, -1) < site_marginal(
                prof, vol, 2.0, 1, 0, -1
            )

    def test_plus_minus_symmetry_is_exact(self, profiles):
        # same recursion on mirrored data: bitwise equality expected
        for prof in profiles.values():
            vol = Volume(3)
            for site in vol.sites():
                for spin in (1, -1):
                    assert site_marginal(prof, vol, 1.5, 1, site, spin) == site_marginal(
                        prof, vol, 1.5, -1, site, -spin
                    )

    def test_reflection_symmetry_for_symmetric_profile(self):
        # profile symmetric under bond reflection x -> 1-x
        values = (1.5, 0.25, 2.0, 0.5, 0.5, 2.0, 0.25, 1.5)
        prof = CouplingProfile.table(-3, values)
        vol = Volume(3)
        for site in vol.sites():
            left = site_marginal(prof, vol, 1.0, 1, site, -1)
            right = site_marginal(prof, vol, 1.0, 1, -site, -1)
            assert rel_close(left, right, 1e-12)

    def test_site_outside_volume_rejected(self):
        with pytest.raises(ValueError):
            site_marginal(CouplingProfile.absolute(), Volume(2), 1.0, 1, 3, -1)


class TestBlockProbability:
    def test_matches_oracle_single_site_block(self):
        prof = CouplingProfile.absolute()
        vol = Volume(1)
        result = enumerate_all(prof, vol, 1.0, 1)
        got = block_probability(prof, vol, 1.0, 1, Block(0, 0))
        assert rel_close(got, result.block_probabilities[Block(0, 0)])

    def test_full_volume_block_impossible_under_minus_boundary(self):
        prof = CouplingProfile.absolute()
        vol = Volume(2)
        assert block_probability(prof, vol, 1.0, -1, Block(-2, 2)) == 0.0

    def test_free_spins_count_pinned_sites(self):
        prof = CouplingProfile.constant(0.0)
        vol = Volume(3)
        for block in enumerate_blocks(vol):
            inside_neighbors = sum(
                1 for nb in (block.left - 1, block.right + 1) if nb in vol
            )
            expected = 2.0 ** -(len(block) + inside_neighbors)
            got = block_probability(prof, vol, 4.0, 1, block)
            assert rel_close(got, expected)

    def test_block_outside_volume_rejected(self):
        with pytest.raises(ValueError):
            block_probability(CouplingProfile.absolute(), Volume(2), 1.0, 1, Block(1, 3))


class TestMaxRunDistribution:
    def test_single_fair_spin(self):
        dist = max_run_distribution(CouplingProfile.constant(0.0), Volume(0), 1.0, 1)
        assert dist.shape == (2,)
        assert rel_close(float(dist[0]), 0.5) and rel_close(float(dist[1]), 0.5)

    def test_matches_oracle(self, profiles):
        vol = Volume(3)
        for prof in profiles.values():
            for boundary in (1, -1):
                hist = enumerate_all(prof, vol, 1.0, boundary).maxrun_histogram
                dist = max_run_distribution(prof, vol, 1.0, boundary)
                for a, b in zip(dist, hist):
                    assert rel_close(float(a), float(b))

    def test_normalized(self, profiles):
        for prof in profiles.values():
            for n in (0, 2, 5):
                for beta in (0.5, 2.0):
                    dist = max_run_distribution(prof, Volume(n), beta, 1)
                    assert abs(float(dist.sum()) - 1.0) <= 1e-10
                    assert np.all(dist >= 0.0)

    def test_tail_monotone_in_threshold(self):
        prof = CouplingProfile.absolute()
        vol = Volume(6)
        tails = [max_run_tail(prof, vol, 1.0, 1, t) for t in range(-1, vol.size + 1)]
        assert tails[0] == 1.0
        assert tails[-1] == 0.0
        for a, b in zip(tails, tails[1:]):
            assert a >= b

    def test_cdf_agrees_with_capped_recursion(self, profiles):
        for prof in profiles.values():
            vol = Volume(10)
            beta = 1.5
            dist = max_run_distribution(prof, vol, beta, 1)
            log_z = log_partition(prof, vol, beta, 1)
            for cap in (0, 1, 3, 10, 21):
                cdf = float(np.sum(dist[: cap + 1]))
                capped = math.exp(
                    run_capped_log_partition(prof, vol, beta, 1, cap) - log_z
                )
                assert rel_close(cdf, capped, 1e-11)

    def test_threshold_helper(self):
        vol = Volume(100)  # 201 sites
        assert run_length_threshold(vol, 1.5) == math.floor(1.5 * math.log(201))
        assert run_length_threshold(Volume(0), 10.0) == 0


class TestMagnetizationGap:
    def test_free_spins_have_zero_gap(self):
        assert magnetization_gap(CouplingProfile.constant(0.0), Volume(5), 2.0) == 0.0

    def test_equals_marginal_difference(self, profiles):
        for prof in profiles.values():
            for n in (0, 3, 6):
                vol = Volume(n)
                for beta in (0.5, 2.0):
                    direct = site_marginal(prof, vol, beta, -1, 0, -1) - site_marginal(
                        prof, vol, beta, 1, 0, -1
                    )
                    assert abs(magnetization_gap(prof, vol, beta) - direct) <= 1e-12

    def test_flip_symmetry_identity(self):
        prof = CouplingProfile.absolute()
        vol = Volume(6)
        gap = magnetization_gap(prof, vol, 2.0)
        assert abs(gap - (1.0 - 2.0 * site_marginal(prof, vol, 2.0, 1, 0, -1))) <= 1e-12

    def test_bounded(self):
        for beta in (0.25, 1.0, 8.0):
            gap = magnetization_gap(CouplingProfile.absolute(), Volume(20), beta)
            assert -1.0 <= gap <= 1.0


class TestOriginBound:
    def test_literal_value(self):
        vol = Volume(10)  # 21 sites
        q = math.exp(-1.0)
        expected = q / (1 - q) + 21.0 ** (2 * (1 - 2.0) + 1) / (1 - q)
        assert rel_close(origin_minus_upper_bound(vol, 2.0, 2.0), expected)

    def test_vanishes_at_large_beta(self):
        vol = Volume(10)
        assert origin_minus_upper_bound(vol, 200.0, 2.0) < 1e-80

    def test_rejects_small_beta(self):
        with pytest.raises(ValueError):
            origin_minus_upper_bound(Volume(5), 1.0, 2.0)
        with pytest.raises(ValueError):
            origin_minus_upper_bound(Volume(5), 0.5, 2.0)

    def test_bounds_engine_marginal(self):
        prof = CouplingProfile.absolute()
        vol = Volume(10)
        for beta in (1.5, 2.0, 4.0):
            marginal = site_marginal(prof, vol, beta, 1, 0, -1)
            assert marginal <= origin_minus_upper_bound(vol, beta, 2.0)


class TestNumericalRange:
    def test_no_overflow_at_extreme_parameters(self):
        prof = CouplingProfile.absolute()
        vol = Volume(10_000)
        log_z = log_partition(prof, vol, 1e4, 1)
        marginal = site_marginal(prof, vol, 1e4, 1, 0, -1)
        gap = magnetization_gap(prof, vol, 1e4)
        assert math.isfinite(log_z)
        assert 0.0 <= marginal <= 1.0
        assert math.isfinite(gap)

    def test_minus_inf_only_for_impossible_events(self):
        prof = CouplingProfile.absolute()
        vol = Volume(3)
        pinned = log_partition(prof, vol, 1.0, 1, {0: -1, 1: 1})
        assert math.isfinite(pinned)
