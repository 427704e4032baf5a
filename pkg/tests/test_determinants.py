import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsci.determinants import (
    ALPHA,
    BETA,
    Determinant,
    apply_excitation,
    enumerate_connected,
    enumerate_sector,
    excitation_between,
    from_bitstring,
    hartree_fock,
    sector_dimension,
    to_bitstring,
    to_index,
)
from qsci.errors import BitstringFormatError, InvalidExcitationError

from oracles import permutation_phase


def dets_strategy(max_norb=6):
    def build(norb, alpha, beta):
        mask = (1 << norb) - 1
        return Determinant(alpha & mask, beta & mask, norb)

    return st.integers(1, max_norb).flatmap(
        lambda m: st.builds(build, st.just(m), st.integers(0, 2**m - 1), st.integers(0, 2**m - 1))
    )


def same_sector_pairs(max_norb=6):
    def pair(norb, n_a, n_b, seed1, seed2):
        alphas = list(itertools.combinations(range(norb), n_a))
        betas = list(itertools.combinations(range(norb), n_b))

        def pick(seed):
            a = alphas[seed % len(alphas)]
            b = betas[(seed // max(len(alphas), 1)) % len(betas)]
            return Determinant(sum(1 << i for i in a), sum(1 << i for i in b), norb)

        return pick(seed1), pick(seed2)

    return st.integers(2, max_norb).flatmap(
        lambda m: st.tuples(st.just(m), st.integers(0, m), st.integers(0, m),
                            st.integers(0, 10**6), st.integers(0, 10**6)).map(lambda t: pair(*t))
    )


class TestBitstrings:
    def test_blocked_decode(self):
        d = from_bitstring("1100", 2)
        assert d.alpha == 0b11 and d.beta == 0b00

    def test_all_zeros_wide(self):
        d = from_bitstring("0" * 42, 21)
        assert d.sector == (0, 0)

    def test_blocked_hf_string_m21(self):
        # 18-electron, 21-orbital reference: alpha and beta blocks each
        # start with nine ones.
        bits = "1" * 9 + "0" * 12 + "1" * 9 + "0" * 12
        d = from_bitstring(bits, 21)
        assert d.sector == (9, 9)
        assert d == hartree_fock(21, 9, 9)

    def test_wrong_length_raises(self):
        with pytest.raises(BitstringFormatError):
            from_bitstring("110", 2)

    def test_bad_character_raises(self):
        with pytest.raises(BitstringFormatError):
            from_bitstring("11a0", 2)

    @given(dets_strategy())
    def test_round_trip(self, det):
        assert from_bitstring(to_bitstring(det), det.norb) == det

    @given(dets_strategy())
    def test_index_round_trip(self, det):
        from qsci.determinants import from_index

        assert from_index(to_index(det), det.norb) == det


class TestExcitationBetween:
    def test_identity(self):
        d = hartree_fock(4, 2, 2)
        info = excitation_between(d, d)
        assert info.degree == 0 and info.phase == 1
        assert info.holes == () and info.particles == ()

    def test_single_no_orbital_between(self):
        d1 = Determinant(0b011, 0, 3)  # alpha {0,1}
        d2 = Determinant(0b101, 0, 3)  # alpha {0,2}
        info = excitation_between(d1, d2)
        assert info.degree == 1
        assert info.holes == ((ALPHA, 1),) and info.particles == ((ALPHA, 2),)
        assert info.phase == permutation_phase(d1, d2) == 1

    def test_single_with_occupied_between(self):
        d1 = Determinant(0b0111, 0, 4)  # alpha {0,1,2}
        d2 = Determinant(0b1101, 0, 4)  # alpha {0,2,3}
        info = excitation_between(d1, d2)
        assert info.degree == 1
        assert info.phase == permutation_phase(d1, d2) == -1

    def test_spin_flip_is_sentinel(self):
        d1 = Determinant(0b1, 0b0, 2)
        d2 = Determinant(0b0, 0b1, 2)
        assert excitation_between(d1, d2).degree > 2

    def test_degree_three_sentinel(self):
        d1 = Determinant(0b000111, 0, 6)
        d2 = Determinant(0b111000, 0, 6)
        assert excitation_between(d1, d2).degree > 2

    @given(same_sector_pairs())
    @settings(max_examples=300)
    def test_phase_matches_permutation_oracle(self, pair):
        d1, d2 = pair
        info = excitation_between(d1, d2)
        if info.degree in (1, 2):
            assert info.phase == permutation_phase(d1, d2)

    @given(same_sector_pairs())
    def test_degree_and_phase_symmetric(self, pair):
        d1, d2 = pair
        fwd = excitation_between(d1, d2)
        bwd = excitation_between(d2, d1)
        assert fwd.degree == bwd.degree
        if fwd.degree <= 2:
            assert fwd.phase == bwd.phase


class TestApplyExcitation:
    def test_homo_lumo_single(self):
        d = hartree_fock(4, 2, 2)
        new, phase = apply_excitation(d, [(ALPHA, 1)], [(ALPHA, 2)])
        assert new.sector == d.sector
        assert new.alpha == 0b101
        assert phase == 1

    def test_empty_hole_raises(self):
        d = hartree_fock(4, 2, 2)
        with pytest.raises(InvalidExcitationError):
            apply_excitation(d, [(ALPHA, 3)], [(ALPHA, 2)])

    def test_occupied_particle_raises(self):
        d = hartree_fock(4, 2, 2)
        with pytest.raises(InvalidExcitationError):
            apply_excitation(d, [(ALPHA, 0)], [(ALPHA, 1)])

    def test_paired_opposite_spin_same_spatial_indices(self):
        # alpha_p beta_p -> alpha_r beta_r with p = q and r = s spatially.
        d = hartree_fock(4, 1, 1)
        new, _ = apply_excitation(d, [(ALPHA, 0), (BETA, 0)], [(ALPHA, 2), (BETA, 2)])
        assert new.alpha == 0b100 and new.beta == 0b100
        assert new.sector == (1, 1)


class TestEnumerateConnected:
    def test_minimal_sector_counts(self):
        d = hartree_fock(2, 1, 1)
        connected = list(enumerate_connected(d))
        assert len(connected) == sector_dimension(2, 1, 1) - 1 == 3

    def test_fully_occupied_yields_nothing(self):
        d = hartree_fock(3, 3, 3)
        assert list(enumerate_connected(d)) == []

    def test_count_matches_sector_filter(self):
        d = hartree_fock(4, 2, 2)
        connected = {c for c, _ in enumerate_connected(d)}
        brute = {
            other
            for other in enumerate_sector(4, 2, 2)
            if other != d and excitation_between(d, other).degree <= 2
        }
        assert connected == brute

    def test_each_yielded_once_with_consistent_info(self):
        d = Determinant(0b0110, 0b0011, 4)
        seen = set()
        for new, info in enumerate_connected(d):
            assert new not in seen
            seen.add(new)
            redone, phase = apply_excitation(d, info.holes, info.particles)
            assert redone == new and phase == info.phase
            ref = excitation_between(d, new)
            assert ref.degree == info.degree and ref.phase == info.phase


class TestSectorArithmetic:
    def test_dimension_formula(self):
        assert sector_dimension(2, 1, 1) == 4
        assert sector_dimension(4, 2, 2) == 36

    def test_enumerate_matches_dimension(self):
        dets = list(enumerate_sector(4, 2, 2))
        assert len(dets) == len(set(dets)) == 36

    def test_worst_case_21_orbitals(self):
        assert sector_dimension(21, 9, 9) == 293930**2
