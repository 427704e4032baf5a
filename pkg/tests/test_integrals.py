import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsci.corpus import corpus_names, corpus_path
from qsci.determinants import hartree_fock
from qsci.errors import FcidumpParseError
from qsci.integrals import IntegralStore, load_fcidump, parse_fcidump, write_fcidump
from qsci.slater_condon import diagonal_element

HEADER = "&FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,1\n ISYM=1,\n&END\n"


class TestParsing:
    def test_core_energy_line(self):
        store = parse_fcidump(HEADER + "0.5 0 0 0 0\n")
        assert store.core_energy == 0.5

    def test_one_electron_line(self):
        store = parse_fcidump(HEADER + "-1.25 1 1 0 0\n")
        assert store.one_body(0, 0) == -1.25

    def test_header_fields(self):
        store = parse_fcidump("&FCI NORB=4,NELEC=4,MS2=2, &END\n0.0 0 0 0 0\n")
        assert (store.norb, store.n_elec, store.ms2) == (4, 4, 2)
        assert store.sector == (3, 1)

    def test_duplicates_overwrite_with_latest(self):
        store = parse_fcidump(HEADER + "1.0 1 1 0 0\n2.0 1 1 0 0\n")
        assert store.one_body(0, 0) == 2.0

    def test_unset_defaults_to_zero(self):
        store = parse_fcidump(HEADER + "0.5 0 0 0 0\n")
        assert store.two_body(0, 1, 1, 0) == 0.0
        assert store.one_body(1, 0) == 0.0

    def test_orbital_energy_lines_skipped(self):
        store = parse_fcidump(HEADER + "0.9 1 0 0 0\n0.5 0 0 0 0\n")
        assert store.core_energy == 0.5
        assert np.all(store.h == 0.0)

    def test_missing_header_raises(self):
        with pytest.raises(FcidumpParseError):
            parse_fcidump("NORB=2\n0.5 0 0 0 0\n")

    def test_index_out_of_range_carries_line_number(self):
        with pytest.raises(FcidumpParseError) as err:
            parse_fcidump(HEADER + "1.0 3 1 0 0\n")
        assert err.value.line_number == 5

    def test_non_numeric_value_raises(self):
        with pytest.raises(FcidumpParseError) as err:
            parse_fcidump(HEADER + "abc 1 1 0 0\n")
        assert "line 5" in str(err.value)

    def test_bad_token_count(self):
        with pytest.raises(FcidumpParseError):
            parse_fcidump(HEADER + "1.0 1 1 0\n")


class TestEightFoldSymmetry:
    def test_single_entry_closure(self):
        store = parse_fcidump(HEADER + "0.3 1 2 1 2\n")
        # (01|01) stored; every permutation image resolves to it.
        assert store.two_body(1, 0, 1, 0) == 0.3
        for idx in [(0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0), (1, 0, 1, 0)]:
            assert store.two_body(*idx) == 0.3

    @given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.integers(0, 3),
           st.floats(-2, 2, allow_nan=False))
    def test_permutation_invariance(self, p, q, r, s, value):
        store = IntegralStore(norb=4, n_elec=4, ms2=0)
        store.set_two_body(p, q, r, s, value)
        images = [
            (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
            (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
        ]
        assert all(store.two_body(*idx) == value for idx in images)

    def test_index_out_of_range(self):
        store = IntegralStore(norb=2, n_elec=2, ms2=0)
        with pytest.raises(IndexError):
            store.two_body(0, 0, 0, 2)


class TestRoundTrip:
    @pytest.mark.parametrize("name", corpus_names())
    def test_serialization_is_idempotent(self, name):
        store = load_fcidump(corpus_path(name))
        text = write_fcidump(store)
        again = parse_fcidump(text)
        assert again.norb == store.norb
        assert again.n_elec == store.n_elec
        assert again.ms2 == store.ms2
        assert again.core_energy == store.core_energy
        assert np.array_equal(again.h, store.h)
        assert np.array_equal(again.g, store.g)
        assert write_fcidump(again) == text

    @pytest.mark.parametrize("name", corpus_names())
    def test_hf_expectation_real_and_finite(self, name):
        store = load_fcidump(corpus_path(name))
        hf = hartree_fock(store.norb, store.n_alpha, store.n_beta)
        e = diagonal_element(hf, store)
        assert isinstance(e, float) and math.isfinite(e)
        assert e < 0.0  # bound molecular systems
