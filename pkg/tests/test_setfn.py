"""Spaces, lattice transforms, and the mass <-> belief correspondence."""

import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given

import beliefbet as bb
from conftest import mass_functions, random_mass, space_of
from oracles import inclusion_exclusion_slack_naive, bits, mobius_naive, zeta_naive


class TestMakeSpace:
    def test_smallest_space(self):
        sp = bb.make_space(["a"])
        assert sp.n == 1
        assert sp.size == 2
        assert sp.full_mask == 1

    def test_four_outcomes(self):
        sp = bb.make_space(["1", "2", "3", "4"])
        assert sp.n == 4
        assert sp.mask_of(["2", "3", "4"]) == 0b1110
        assert sp.members(0b1110) == ("2", "3", "4")

    def test_duplicate_label_rejected(self):
        with pytest.raises(bb.DuplicateLabelError):
            bb.make_space(["a", "a"])

    def test_size_bounds(self):
        with pytest.raises(bb.SizeOutOfRangeError):
            bb.make_space([])
        with pytest.raises(bb.SizeOutOfRangeError):
            bb.make_space([f"x{i}" for i in range(25)])

    def test_mask_range_checked(self):
        sp = bb.make_space(["a", "b"])
        with pytest.raises(bb.BeliefBetError):
            sp.members(4)

    def test_unknown_label(self):
        sp = bb.make_space(["a", "b"])
        with pytest.raises(KeyError):
            sp.mask_of(["z"])


class TestTransforms:
    @given(mass_functions(max_n=8))
    def test_zeta_matches_naive(self, m):
        fast = bb.zeta_transform(m.as_dense())
        brute = zeta_naive(m.as_dense().tolist())
        assert np.abs(fast - np.array(brute)).max() <= 1e-13

    @given(mass_functions(max_n=8))
    def test_mobius_matches_naive(self, m):
        bel = bb.mass_to_belief(m)
        fast = bb.mobius_transform(bel.values)
        brute = mobius_naive(bel.values.tolist())
        assert np.abs(fast - np.array(brute)).max() <= 1e-13

    def test_agreement_at_ten_outcomes(self):
        rng = np.random.default_rng(7)
        sp = space_of(10)
        raw = rng.uniform(0.0, 1.0, size=sp.size)
        raw[0] = 0.0
        dense = raw / math.fsum(raw.tolist())
        assert np.abs(bb.zeta_transform(dense) - np.array(zeta_naive(dense.tolist()))).max() <= 1e-13
        bel = bb.zeta_transform(dense)
        assert np.abs(bb.mobius_transform(bel) - np.array(mobius_naive(bel.tolist()))).max() <= 1e-13

    @given(mass_functions(max_n=6))
    def test_round_trip_recovers_mass(self, m):
        recovered = bb.belief_to_mass(bb.mass_to_belief(m))
        assert isinstance(recovered, bb.MassFunction)
        assert np.abs(recovered.as_dense() - m.as_dense()).max() <= 1e-12

    def test_round_trip_up_to_twelve_outcomes(self):
        rng = np.random.default_rng(11)
        for n in range(2, 13):
            sp = bb.make_space([f"w{i}" for i in range(n)])
            masks = rng.choice(sp.size - 1, size=min(16, sp.size - 1), replace=False) + 1
            raw = rng.uniform(0.05, 1.0, size=masks.size)
            total = math.fsum(raw.tolist())
            m = bb.MassFunction(sp, {int(mk): float(w) / total for mk, w in zip(masks, raw)})
            recovered = bb.belief_to_mass(bb.mass_to_belief(m))
            assert np.abs(recovered.as_dense() - m.as_dense()).max() <= 1e-12

    def test_rejects_non_power_of_two(self):
        with pytest.raises(bb.BeliefBetError):
            bb.zeta_transform(np.zeros(5))


class TestMassToBelief:
    def test_vacuous(self):
        sp = space_of(3)
        bel = bb.mass_to_belief(bb.MassFunction(sp, {sp.full_mask: 1.0}))
        for mask in range(sp.size):
            assert bel.values[mask] == (1.0 if mask == sp.full_mask else 0.0)

    def test_singleton_mass_is_additive(self):
        sp = space_of(3)
        p = [0.2, 0.3, 0.5]
        bel = bb.mass_to_belief(bb.MassFunction(sp, {1 << i: p[i] for i in range(3)}))
        for mask in range(sp.size):
            assert bel.values[mask] == pytest.approx(
                math.fsum(p[i] for i in bits(mask)), abs=1e-15
            )

    def test_two_outcome_example(self):
        # oracle: direct subset-sum enumeration over all 4 subsets
        sp = space_of(2)
        weights = {0b01: 0.3, 0b11: 0.7}
        expected = [
            math.fsum(w for mk, w in weights.items() if mk & a == mk)
            for a in range(4)
        ]
        assert expected == [0.0, 0.3, 0.0, 1.0]
        bel = bb.mass_to_belief(bb.MassFunction(sp, weights))
        assert bel.values.tolist() == expected

    @given(mass_functions(max_n=6))
    def test_monotone_under_inclusion(self, m):
        bel = bb.mass_to_belief(m)
        v = np.array(bel.values)
        for b in range(m.space.n):
            grown = v.reshape(-1, 2, 1 << b)
            assert np.all(grown[:, 0, :] <= grown[:, 1, :] + 1e-12)

    @given(mass_functions(max_n=6))
    def test_output_is_belief_function(self, m):
        assert bb.is_belief_function(bb.mass_to_belief(m))


def induced_two_row_values(space):
    """Closed form of the reference model's indicator prices:
    min(|A * {1,2}| / 2, |A| / 4)."""
    half = space.mask_of(["1", "2"])
    return np.array(
        [
            min((mask & half).bit_count() / 2.0, mask.bit_count() / 4.0)
            for mask in range(space.size)
        ]
    )


class TestBeliefToMass:
    def test_vacuous_round_trip_exact(self):
        sp = space_of(3)
        m = bb.MassFunction(sp, {sp.full_mask: 1.0})
        recovered = bb.belief_to_mass(bb.mass_to_belief(m))
        assert recovered.weights == {sp.full_mask: 1.0}

    def test_reference_table_has_negative_mass(self, paper_space):
        values = induced_two_row_values(paper_space)
        s0 = paper_space.mask_of(["2", "3", "4"])
        # oracle first: inclusion-exclusion over the 8 subsets of {2,3,4}
        expected = math.fsum(
            (-1) ** ((s0 ^ sub).bit_count()) * values[sub]
            for sub in range(paper_space.size)
            if sub & s0 == sub
        )
        assert expected == -0.25
        report = bb.belief_to_mass(bb.SetFunction(paper_space, values))
        assert isinstance(report, bb.NegativeMassReport)
        assert dict(report.entries)[s0] == pytest.approx(-0.25, abs=1e-15)
        assert report.witness() == s0

    def test_additive_probability_gives_singletons(self):
        sp = space_of(4)
        rng = np.random.default_rng(3)
        p = rng.dirichlet(np.ones(4))
        values = np.array([math.fsum(p[i] for i in bits(mask)) for mask in range(sp.size)])
        m = bb.belief_to_mass(bb.SetFunction(sp, values))
        assert isinstance(m, bb.MassFunction)
        dense = m.as_dense()
        for mask in range(sp.size):
            if mask.bit_count() != 1:
                assert abs(dense[mask]) <= 1e-12
        for i in range(4):
            assert dense[1 << i] == pytest.approx(p[i], abs=1e-12)

    def test_endpoint_violations_raise(self):
        sp = space_of(2)
        with pytest.raises(bb.EndpointViolationError):
            bb.belief_to_mass(bb.SetFunction(sp, np.array([0.1, 0.2, 0.2, 1.0])))
        with pytest.raises(bb.EndpointViolationError):
            bb.belief_to_mass(bb.SetFunction(sp, np.array([0.0, 0.2, 0.2, 0.9])))

    def test_tiny_negative_noise_is_clamped(self):
        sp = space_of(2)
        # a belief table nudged by less than the tolerance at one subset
        values = np.array([0.0, 0.5 - 5e-10, 0.25, 1.0])
        m = bb.belief_to_mass(bb.SetFunction(sp, values))
        assert isinstance(m, bb.MassFunction)
        assert math.fsum(m.weights.values()) == pytest.approx(1.0, abs=1e-15)

    def test_genuine_negative_is_reported(self):
        sp = space_of(2)
        values = np.array([0.0, 0.6, 0.6, 1.0])
        report = bb.belief_to_mass(bb.SetFunction(sp, values))
        assert isinstance(report, bb.NegativeMassReport)
        assert report.entries == ((3, pytest.approx(-0.2, abs=1e-15)),)


class TestIsBeliefFunction:
    def test_reference_table_rejected_with_canonical_witness(self, paper_space):
        values = induced_two_row_values(paper_space)
        check = bb.is_belief_function(bb.SetFunction(paper_space, values))
        assert not check
        s0 = paper_space.mask_of(["2", "3", "4"])
        assert check.negative_subset == s0
        assert check.negative_mass == pytest.approx(-0.25, abs=1e-15)
        expected_family = tuple(sorted(s0 ^ (1 << i) for i in bits(s0)))
        assert check.family == expected_family

    def test_counting_measure_accepted(self):
        sp = space_of(4)
        values = np.array([mask.bit_count() / 4.0 for mask in range(sp.size)])
        assert bb.is_belief_function(bb.SetFunction(sp, values))

    def test_endpoint_failures(self):
        sp = space_of(2)
        bad_empty = bb.SetFunction(sp, np.array([0.5, 0.5, 0.5, 1.0]))
        check = bb.is_belief_function(bad_empty)
        assert not check and "empty" in check.reason
        bad_full = bb.SetFunction(sp, np.array([0.0, 0.5, 0.5, 0.7]))
        check = bb.is_belief_function(bad_full)
        assert not check and "full" in check.reason

    def test_witness_family_slack_equals_mass(self):
        # negative-mass witness soundness on 5-outcome tables
        rng = np.random.default_rng(23)
        sp = space_of(5)
        found = 0
        for _ in range(200):
            values = rng.uniform(0.0, 1.0, size=sp.size)
            values[0] = 0.0
            values[-1] = 1.0
            f = bb.SetFunction(sp, values)
            check = bb.is_belief_function(f)
            if check or check.negative_subset is None:
                continue
            if check.negative_subset.bit_count() < 2:
                continue
            found += 1
            slack = bb.inclusion_exclusion_slack(f, check.family)
            assert slack == pytest.approx(check.negative_mass, abs=1e-12)
            assert slack == pytest.approx(
                inclusion_exclusion_slack_naive(values.tolist(), list(check.family)), abs=1e-12
            )
        assert found >= 50


class TestInclusionExclusionSlack:
    def test_single_set_slack_is_exactly_zero(self):
        sp = space_of(3)
        rng = np.random.default_rng(5)
        values = rng.uniform(0, 1, sp.size)
        f = bb.SetFunction(sp, values)
        for mask in range(sp.size):
            assert bb.inclusion_exclusion_slack(f, [mask]) == 0.0

    def test_reference_pair_slack(self, paper_space):
        values = induced_two_row_values(paper_space)
        f = bb.SetFunction(paper_space, values)
        family = [paper_space.mask_of(["2", "3"]), paper_space.mask_of(["2", "4"])]
        slack = bb.inclusion_exclusion_slack(f, family)
        # Bel({2,3,4}) + Bel({2}) - Bel({2,3}) - Bel({2,4}) = 3/4 - 1
        assert slack == 0.75 - 1.0
        assert slack == pytest.approx(inclusion_exclusion_slack_naive(values.tolist(), family), abs=1e-15)

    def test_dyadic_probability_slack_exactly_zero(self):
        sp = space_of(3)
        p = [0.25, 0.25, 0.5]
        values = np.array([math.fsum(p[i] for i in bits(mask)) for mask in range(sp.size)])
        f = bb.SetFunction(sp, values)
        for count in (1, 2, 3):
            for family in combinations(range(sp.size), count):
                assert bb.inclusion_exclusion_slack(f, list(family)) == 0.0

    def test_all_small_families_nonnegative_for_masses(self):
        rng = np.random.default_rng(9)
        sp = space_of(5)
        for _ in range(5):
            m = random_mass(rng, sp)
            f = bb.mass_to_belief(m).as_set_function()
            for count in (1, 2, 3):
                for family in combinations(range(sp.size), count):
                    assert bb.inclusion_exclusion_slack(f, list(family)) >= -1e-9

    def test_family_size_limit(self):
        sp = space_of(2)
        f = bb.SetFunction(sp, np.array([0.0, 0.5, 0.5, 1.0]))
        with pytest.raises(bb.FamilyTooLargeError):
            bb.inclusion_exclusion_slack(f, [1] * 21)
        with pytest.raises(bb.BeliefBetError):
            bb.inclusion_exclusion_slack(f, [])

    def test_deletion_family_slack_is_mobius_weight(self):
        # holds for arbitrary tables, not just beliefs
        rng = np.random.default_rng(41)
        for n in (2, 3, 4):
            sp = space_of(n)
            for _ in range(20):
                values = rng.uniform(0.0, 1.0, size=sp.size)
                f = bb.SetFunction(sp, values)
                mob = mobius_naive(values.tolist())
                for subset in range(3, sp.size):
                    if subset.bit_count() < 2:
                        continue
                    family = [subset ^ (1 << i) for i in bits(subset)]
                    slack = bb.inclusion_exclusion_slack(f, family)
                    assert slack == pytest.approx(mob[subset], abs=1e-12)


class TestPlausibility:
    def test_vacuous_plausibility_one(self):
        sp = space_of(3)
        bel = bb.mass_to_belief(bb.MassFunction(sp, {sp.full_mask: 1.0}))
        for mask in range(1, sp.size - 1):
            assert bb.plausibility(bel, mask) == 1.0

    def test_probability_self_conjugate(self):
        sp = space_of(3)
        p = [0.25, 0.25, 0.5]
        bel = bb.mass_to_belief(bb.MassFunction(sp, {1 << i: p[i] for i in range(3)}))
        for mask in range(sp.size):
            assert bb.plausibility(bel, mask) == pytest.approx(bel.values[mask], abs=1e-15)

    def test_reference_value(self, paper_space, two_row_model):
        # conjugate of {2} is 1 - value({1,3,4}) = 1 - min(1/2, 3/4)
        rest = paper_space.mask_of(["1", "3", "4"])
        assert induced_two_row_values(paper_space)[rest] == 0.5
        f = bb.induced_set_function(two_row_model)
        assert 1.0 - f.values[rest] == 0.5

    @given(mass_functions(max_n=6))
    def test_plausibility_dominates_belief(self, m):
        bel = bb.mass_to_belief(m)
        for mask in range(m.space.size):
            assert bb.plausibility(bel, mask) >= bel.values[mask] - 1e-12
