import math

import numpy as np
import pytest

from qsci.determinants import (
    ALPHA,
    BETA,
    Determinant,
    enumerate_connected,
    enumerate_sector,
    from_bitstring,
    hartree_fock,
    sector_dimension,
    to_bitstring,
)
from qsci.eigensolver import davidson_lowest
from qsci.evolution_sim import MeasurementSet, evolve_and_measure, index_to_bitstring
from qsci.baselines import fci_solve
from qsci.qubit_hamiltonian import jordan_wigner
from qsci.sampler import (
    OccupancyDistribution,
    SamplerConfig,
    expand_round,
    harvest_valid,
    initial_state,
    occupancy_distribution,
    propose_candidates,
    run_qsci,
    screen_candidates,
)
from qsci.seeding import derive_rng
from qsci.slater_condon import build_interaction_matrix, matrix_element


def uniform_occupancy(norb):
    return OccupancyDistribution(np.full(norb, 0.5), np.full(norb, 0.5))


class TestOccupancyDistribution:
    def test_constant_hf_shots(self):
        hf = hartree_fock(3, 2, 1)
        ms = MeasurementSet(1.0, [to_bitstring(hf)] * 10, 6)
        occ = occupancy_distribution(ms, 3)
        np.testing.assert_array_equal(occ.f_alpha, [1, 1, 0])
        np.testing.assert_array_equal(occ.f_beta, [1, 0, 0])

    def test_uniform_random_shots(self):
        rng = derive_rng(0, "occ")
        n = 100_000
        shots = [index_to_bitstring(int(i), 8) for i in rng.integers(0, 256, size=n)]
        occ = occupancy_distribution(MeasurementSet(1.0, shots, 8), 4)
        sigma = 0.5 / math.sqrt(n)
        for f in np.concatenate([occ.f_alpha, occ.f_beta]):
            assert abs(f - 0.5) < 3 * sigma

    def test_hand_counted_four_shots(self):
        shots = ["1100", "1100", "0110", "1010"]
        occ = occupancy_distribution(MeasurementSet(1.0, shots, 4), 2)
        np.testing.assert_allclose(occ.f_alpha, [0.75, 0.75])
        np.testing.assert_allclose(occ.f_beta, [0.5, 0.0])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            MeasurementSet(1.0, [], 4)


class TestHarvestValid:
    def test_hf_only_shots(self):
        hf = hartree_fock(2, 1, 1)
        ms = MeasurementSet(1.0, [to_bitstring(hf)] * 5, 4)
        assert harvest_valid(ms, (1, 1)) == [hf]

    def test_wrong_parity_excluded(self):
        ms = MeasurementSet(1.0, ["1110", "1010"], 4)
        assert harvest_valid(ms, (1, 1)) == [from_bitstring("1010", 2)]

    def test_uniform_acceptance_fraction_worst_case(self):
        # Uniform 42-bit strings against the (9, 9) sector of 21 orbitals.
        rng = derive_rng(3, "uniform42")
        n = 200_000
        norb, sector = 21, (9, 9)
        shots = ["".join("1" if rng.random() < 0.5 else "0" for _ in range(42))
                 for _ in range(n)]
        accepted = 0
        for b in shots:
            if b[:21].count("1") == 9 and b[21:].count("1") == 9:
                accepted += 1
        expected = sector_dimension(norb, *sector) / 2**42
        assert abs(expected - 0.019643) < 1e-4  # 8.639e10 / 2^42
        sigma = math.sqrt(expected * (1 - expected) / n)
        assert abs(accepted / n - expected) < 3 * sigma
        kept = harvest_valid(MeasurementSet(1.0, shots[:2000], 42), sector)
        assert all(d.sector == sector for d in kept)

    def test_frequency_ordering(self):
        a = "1010"
        b = "0101"
        ms = MeasurementSet(1.0, [b, a, a], 4)
        assert harvest_valid(ms, (1, 1)) == [from_bitstring(a, 2), from_bitstring(b, 2)]


class TestProposeCandidates:
    def test_uniform_occ_single_probability(self):
        parent = hartree_fock(4, 2, 2)
        occ = uniform_occupancy(4)
        rng = derive_rng(0, "prop")
        for _ in range(50):
            cands = propose_candidates(parent, occ, rng)
            assert len(cands) == 5
            # Singles carry probability (1/2)*(1/2) under a flat prior.
            assert abs(cands[0][1] - 0.25) < 1e-12
            assert abs(cands[2][1] - 0.25) < 1e-12

    def test_zero_weight_hole_never_drawn(self):
        parent = hartree_fock(4, 2, 2)
        f_alpha = np.array([0.0, 0.6, 0.5, 0.5])  # orbital 0 never a hole
        occ = OccupancyDistribution(f_alpha, np.full(4, 0.5))
        rng = derive_rng(1, "prop")
        for _ in range(300):
            cands = propose_candidates(parent, occ, rng)
            single_alpha = cands[0][0]
            assert single_alpha.alpha & 0b1  # orbital 0 still occupied

    def test_single_frequencies_match_product_formula(self):
        parent = hartree_fock(4, 2, 2)
        f_alpha = np.array([0.8, 0.4, 0.3, 0.1])
        f_beta = np.full(4, 0.5)
        occ = OccupancyDistribution(f_alpha, f_beta)
        rng = derive_rng(2, "prop")
        n = 100_000
        counts: dict = {}
        for _ in range(n):
            det = propose_candidates(parent, occ, rng)[0][0]
            counts[det] = counts.get(det, 0) + 1
        hole_w = f_alpha[[0, 1]] / f_alpha[[0, 1]].sum()
        part_w = (1 - f_alpha[[2, 3]]) / (1 - f_alpha[[2, 3]]).sum()
        for hi, h in enumerate([0, 1]):
            for pi, p in enumerate([2, 3]):
                expected = hole_w[hi] * part_w[pi]
                det = Determinant(parent.alpha ^ (1 << h) | (1 << p), parent.beta, 4)
                freq = counts.get(det, 0) / n
                sigma = math.sqrt(expected * (1 - expected) / n)
                assert abs(freq - expected) < 3 * sigma

    def test_probability_matches_draw(self):
        parent = hartree_fock(4, 2, 2)
        f_alpha = np.array([0.8, 0.4, 0.3, 0.1])
        occ = OccupancyDistribution(f_alpha, np.full(4, 0.5))
        rng = derive_rng(9, "prop")
        cands = propose_candidates(parent, occ, rng)
        det, prob = cands[0]
        hole = [o for o in (0, 1) if not det.alpha >> o & 1][0]
        part = [o for o in (2, 3) if det.alpha >> o & 1][0]
        expected = (f_alpha[hole] / f_alpha[[0, 1]].sum()) * (
            (1 - f_alpha[part]) / (1 - f_alpha[[2, 3]]).sum()
        )
        assert abs(prob - expected) < 1e-12

    def test_no_virtuals_skips_channels(self):
        parent = hartree_fock(2, 2, 1)  # alpha channel full
        occ = uniform_occupancy(2)
        cands = propose_candidates(parent, occ, derive_rng(3, "p"))
        # Only the beta single survives: no alpha virtuals, no doubles.
        assert len(cands) == 1
        det = cands[0][0]
        assert det.alpha == parent.alpha and det.beta != parent.beta

    def test_sector_preserved(self):
        parent = hartree_fock(5, 2, 3)
        occ = uniform_occupancy(5)
        rng = derive_rng(4, "p")
        for _ in range(200):
            for det, _ in propose_candidates(parent, occ, rng):
                assert det.sector == parent.sector


class TestScreenCandidates:
    def test_zero_coupling_never_outranks(self, h4_store):
        parent = hartree_fock(4, 2, 2)
        connected = [d for d, _ in enumerate_connected(parent)]
        coupled = next(d for d in connected if matrix_element(parent, d, h4_store) != 0.0)
        unconnected = Determinant(0b1100, 0b1100, 4)  # degree 4 from parent
        assert matrix_element(parent, unconnected, h4_store) == 0.0
        ranked = screen_candidates([(unconnected, 0.9), (coupled, 0.05)], parent, h4_store, 2)
        assert ranked[0] == coupled

    def test_monotone_in_probability(self, h4_store):
        # Spin-mirrored singles couple identically to the restricted
        # reference; the higher draw probability must rank first.
        parent = hartree_fock(4, 2, 2)
        alpha_single = Determinant(0b0101, 0b0011, 4)  # alpha 1 -> 2
        beta_single = Determinant(0b0011, 0b0101, 4)  # beta 1 -> 2
        e_a = matrix_element(parent, alpha_single, h4_store)
        e_b = matrix_element(parent, beta_single, h4_store)
        assert e_a == e_b
        ranked = screen_candidates(
            [(alpha_single, 0.1), (beta_single, 0.2)], parent, h4_store, 2
        )
        assert ranked[0] == beta_single

    def test_ranking_matches_brute_force_sort(self, h4_store):
        parent = hartree_fock(4, 2, 2)
        rng = derive_rng(6, "screen")
        occ = uniform_occupancy(4)
        batch = []
        for _ in range(4):
            batch.extend(propose_candidates(parent, occ, rng))
        ranked = screen_candidates(batch, parent, h4_store, len(batch))
        merged: dict = {}
        for det, prob in batch:
            score = prob * abs(matrix_element(parent, det, h4_store))
            merged[det] = max(merged.get(det, -1.0), score)
        brute = [d for d, _ in sorted(merged.items(), key=lambda kv: (-kv[1], kv[0].key()))]
        assert ranked == brute

    def test_duplicate_merge_keeps_max(self, h4_store):
        parent = hartree_fock(4, 2, 2)
        det = next(
            d for d, _ in enumerate_connected(parent)
            if matrix_element(parent, d, h4_store) != 0.0
        )
        zero_det = Determinant(0b1100, 0b1100, 4)
        ranked = screen_candidates(
            [(det, 0.01), (det, 0.5), (zero_det, 1.0)], parent, h4_store, 2
        )
        assert ranked[0] == det


class TestExpandRound:
    def test_pathological_screen_threshold_is_noop(self, h4_store):
        config = SamplerConfig(d_max=36, n_rounds=1, n_samples=5, eps_screen=1.1,
                               eps_wf=1e-5, seed=0)
        state = initial_state(h4_store, (2, 2))
        before = (state.dets, state.energy)
        after = expand_round(state, uniform_occupancy(4), config, h4_store)
        assert (after.dets, after.energy) == before

    def test_full_sector_adds_nothing(self, h4_store):
        dets = tuple(enumerate_sector(4, 2, 2))
        im = build_interaction_matrix(dets, h4_store)
        res = davidson_lowest(im)
        state = initial_state(h4_store, (2, 2))
        state.dets, state.matrix, state.energy, state.vector = dets, im, res.energy, res.vector
        config = SamplerConfig(d_max=100, n_rounds=1, n_samples=5, seed=1)
        e_before = state.energy
        after = expand_round(state, uniform_occupancy(4), config, h4_store)
        assert len(after.dets) <= 36
        assert abs(after.energy - e_before) < 1e-9

    def test_one_round_lowers_energy_from_hf(self, h4_store):
        config = SamplerConfig(d_max=36, n_rounds=1, n_samples=10, seed=3)
        state = initial_state(h4_store, (2, 2))
        e_hf = state.energy
        after = expand_round(state, uniform_occupancy(4), config, h4_store)
        assert after.energy < e_hf - 1e-6  # strict variational gain

    def test_cap_respected(self, h4_store):
        config = SamplerConfig(d_max=5, n_rounds=1, n_samples=20, seed=3)
        state = initial_state(h4_store, (2, 2))
        after = expand_round(state, uniform_occupancy(4), config, h4_store)
        assert len(after.dets) <= 5


def h2_measurements(h2_store, seed=5, p_dep=0.0):
    ham = jordan_wigner(h2_store)
    hf = hartree_fock(2, 1, 1)
    return evolve_and_measure(
        ham, hf, 2 * math.pi / 5, 3, 8, 256, n_rotations=80, p_dep=p_dep, seed=seed
    )


class TestRunQsci:
    def test_dmax_one_returns_immediately(self, h2_store):
        sets = h2_measurements(h2_store)
        config = SamplerConfig(d_max=1, n_rounds=2, n_samples=5, seed=5)
        state = run_qsci(sets, config, h2_store, (1, 1))
        assert state.dimension == 1
        assert state.counter == 0
        assert state.dets[0] == hartree_fock(2, 1, 1)

    def test_h2_converges_to_fci(self, h2_store):
        sets = h2_measurements(h2_store)
        config = SamplerConfig(d_max=10, n_rounds=2, n_samples=5, delta_conv=1e-6, seed=5)
        state = run_qsci(sets, config, h2_store, (1, 1))
        e_fci = fci_solve(h2_store, (1, 1)).energy
        assert abs(state.energy - e_fci) <= 1e-6

    def test_bit_identical_reruns(self, h2_store):
        sets = h2_measurements(h2_store)
        config = SamplerConfig(d_max=10, n_rounds=2, n_samples=5, seed=5)
        a = run_qsci(sets, config, h2_store, (1, 1))
        b = run_qsci(sets, config, h2_store, (1, 1))
        assert a.dets == b.dets
        assert a.energy == b.energy
        assert np.array_equal(a.vector, b.vector)
        assert [
            (r.step, r.round, r.phase, r.dim, r.energy, r.delta) for r in a.trace
        ] == [(r.step, r.round, r.phase, r.dim, r.energy, r.delta) for r in b.trace]

    def test_invariants_along_run(self, h4_stretched_store):
        store = h4_stretched_store
        ham = jordan_wigner(store)
        hf = hartree_fock(4, 2, 2)
        sets = evolve_and_measure(ham, hf, 2 * math.pi / 5, 3, 5, 512,
                                  n_rotations=150, p_dep=0.3, seed=21)
        config = SamplerConfig(d_max=20, n_rounds=3, n_samples=8, seed=21)
        state = run_qsci(sets, config, store, (2, 2))
        assert len(set(state.dets)) == len(state.dets)
        assert all(d.sector == (2, 2) for d in state.dets)
        assert state.dimension <= config.d_max
        dims = [r.dim for r in state.trace]
        assert max(dims) <= config.d_max
        expand = [r for r in state.trace if r.phase == "expand"]
        for rec in expand:
            assert rec.delta >= -1e-8  # expansion legs never raise E

    def test_empty_measurement_list_rejected(self, h2_store):
        with pytest.raises(ValueError):
            run_qsci([], SamplerConfig(seed=0), h2_store, (1, 1))


class TestSamplerConfigValidation:
    def test_filter_must_not_delete_screened_parents(self):
        with pytest.raises(ValueError):
            SamplerConfig(eps_screen=1e-5, eps_wf=1e-2)

    def test_positive_fields(self):
        with pytest.raises(ValueError):
            SamplerConfig(d_max=0)
