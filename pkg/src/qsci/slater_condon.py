"""Hamiltonian matrix elements between determinants and sparse assembly.

Elements are evaluated from the excitation structure of a determinant
pair: diagonal, single, and double rules with spin-resolved Coulomb and
exchange contributions; pairs differing by more than a double vanish.
All arithmetic is 64-bit float, Hartree units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .determinants import ALPHA, BETA, Determinant, ExcitationInfo, excitation_between
from .determinants import enumerate_connected
from .errors import DimensionError
from .integrals import IntegralStore

# Below this dimension assembly compares every pair directly; above it,
# connected candidates are generated per row and located by hash.
ALL_PAIRS_MAX = 2000


def diagonal_element(det: Determinant, store: IntegralStore) -> float:
    occ_a = det.occupied(ALPHA)
    occ_b = det.occupied(BETA)
    e = store.core_energy
    for i in occ_a:
        e += store.h[i, i]
    for i in occ_b:
        e += store.h[i, i]
    for occ in (occ_a, occ_b):
        for idx, i in enumerate(occ):
            for j in occ[idx + 1 :]:
                e += store.two_body(i, i, j, j) - store.two_body(i, j, j, i)
    for i in occ_a:
        for j in occ_b:
            e += store.two_body(i, i, j, j)
    return float(e)


def _single_element(det: Determinant, info: ExcitationInfo, store: IntegralStore) -> float:
    (spin, h), (_, p) = info.holes[0], info.particles[0]
    e = store.h[h, p]
    same = det.occupied(spin)
    other = det.occupied(BETA if spin == ALPHA else ALPHA)
    for j in same:
        e += store.two_body(h, p, j, j) - store.two_body(h, j, j, p)
    for j in other:
        e += store.two_body(h, p, j, j)
    return float(info.phase * e)


def _double_element(info: ExcitationInfo, store: IntegralStore) -> float:
    (s1, h1), (s2, h2) = info.holes
    (_, p1), (_, p2) = info.particles
    e = store.two_body(h1, p1, h2, p2)
    if s1 == s2:
        e -= store.two_body(h1, p2, h2, p1)
    return float(info.phase * e)


def element_from_info(
    det: Determinant, info: ExcitationInfo, store: IntegralStore
) -> float:
    """Matrix element given the pre-computed excitation structure of d2 from det."""
    if info.degree == 0:
        return diagonal_element(det, store)
    if info.degree == 1:
        return _single_element(det, info, store)
    if info.degree == 2:
        return _double_element(info, store)
    return 0.0


def matrix_element(d1: Determinant, d2: Determinant, store: IntegralStore) -> float:
    """<d1|H|d2> in Hartree; zero for pairs not connected by <= double."""
    if d1.norb != d2.norb or d1.norb != store.norb:
        raise DimensionError("determinants and integrals disagree on orbital count")
    return element_from_info(d1, excitation_between(d1, d2), store)


@dataclass
class InteractionMatrix:
    """Symmetric sparse H over an ordered determinant list (row k = dets[k])."""

    dets: tuple[Determinant, ...]
    matrix: sp.csr_matrix

    @property
    def dimension(self) -> int:
        return len(self.dets)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _validate_dets(dets) -> tuple[Determinant, ...]:
    dets = tuple(dets)
    if not dets:
        raise DimensionError("determinant list is empty")
    if len(set(dets)) != len(dets):
        raise ValueError("duplicate determinants in input")
    sector = dets[0].sector
    for d in dets:
        if d.sector != sector:
            raise ValueError("determinants span more than one particle sector")
    return dets


def _canonical(rows, cols, vals, shape) -> sp.csr_matrix:
    mat = sp.coo_matrix((vals, (rows, cols)), shape=shape).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()
    return mat


def build_interaction_matrix(
    dets, store: IntegralStore, method: str = "auto"
) -> InteractionMatrix:
    """Assemble H over ``dets``; entries beyond double excitations are absent.

    ``method``: "pairs" compares all pairs, "hash" looks up connected
    determinants per row, "auto" picks by size.  Both produce identical
    matrices; the pairwise path exists for cross-checking.
    """
    dets = _validate_dets(dets)
    k_dim = len(dets)
    if method == "auto":
        method = "pairs" if k_dim <= ALL_PAIRS_MAX else "hash"
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []

    def add(k, l, value):
        rows.append(k)
        cols.append(l)
        vals.append(value)

    if method == "pairs":
        for k, dk in enumerate(dets):
            add(k, k, diagonal_element(dk, store))
            for l in range(k + 1, k_dim):
                info = excitation_between(dk, dets[l])
                if info.degree > 2:
                    continue
                value = element_from_info(dk, info, store)
                if value != 0.0:
                    add(k, l, value)
                    add(l, k, value)
    elif method == "hash":
        index = {d: i for i, d in enumerate(dets)}
        for k, dk in enumerate(dets):
            add(k, k, diagonal_element(dk, store))
            for d2, info in enumerate_connected(dk):
                l = index.get(d2)
                if l is None or l <= k:
                    continue
                value = element_from_info(dk, info, store)
                if value != 0.0:
                    add(k, l, value)
                    add(l, k, value)
    else:
        raise ValueError(f"unknown assembly method {method!r}")
    return InteractionMatrix(dets, _canonical(rows, cols, vals, (k_dim, k_dim)))


def extend_interaction_matrix(
    old: InteractionMatrix, new_dets, store: IntegralStore
) -> InteractionMatrix:
    """Grow by the block structure [[H_old, B], [B^T, C]].

    Identical to rebuilding from scratch on the concatenated list.
    """
    new_dets = tuple(new_dets)
    if not new_dets:
        return old
    if set(new_dets) & set(old.dets):
        raise ValueError("new determinants overlap the existing set")
    combined = _validate_dets(old.dets + new_dets)
    n_old, n_new = len(old.dets), len(new_dets)

    rows, cols, vals = [], [], []
    for k, dk in enumerate(old.dets):
        for j, dj in enumerate(new_dets):
            info = excitation_between(dk, dj)
            if info.degree > 2:
                continue
            value = element_from_info(dk, info, store)
            if value != 0.0:
                rows.append(k)
                cols.append(j)
                vals.append(value)
    b_block = _canonical(rows, cols, vals, (n_old, n_new))
    c_block = build_interaction_matrix(new_dets, store).matrix
    mat = sp.bmat([[old.matrix, b_block], [b_block.T, c_block]], format="csr")
    mat.sum_duplicates()
    mat.sort_indices()
    return InteractionMatrix(combined, mat)
