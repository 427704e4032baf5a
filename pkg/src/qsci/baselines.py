"""Classical selected-CI comparators: exact FCI, Heatbath, CIPSI-style.

The CIPSI-style criterion documented here (first-order perturbative
coefficient ranking) substitutes for external selected-CI codes; its
outputs are labeled by method tag and never claimed to replicate any
particular external implementation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .determinants import Determinant, enumerate_connected, enumerate_sector, hartree_fock
from .determinants import sector_dimension
from .eigensolver import davidson_lowest
from .errors import CapabilityError
from .integrals import IntegralStore
from .slater_condon import (
    build_interaction_matrix,
    diagonal_element,
    element_from_info,
    extend_interaction_matrix,
)

FCI_MAX_DIMENSION = 10**6


@dataclass
class BaselineResult:
    method: str
    dets: tuple[Determinant, ...]
    energy: float
    vector: np.ndarray
    trace: list[tuple[int, float]] = field(default_factory=list)  # (|D|, E)
    intruders: int = 0


def fci_solve(store: IntegralStore, sector: tuple[int, int]) -> BaselineResult:
    """Exact ground energy over the whole particle sector."""
    dim = sector_dimension(store.norb, *sector)
    if dim > FCI_MAX_DIMENSION:
        raise CapabilityError(
            f"sector dimension {dim:.3e} exceeds the exact-diagonalization cap {FCI_MAX_DIMENSION:.0e}"
        )
    dets = tuple(enumerate_sector(store.norb, *sector))
    matrix = build_interaction_matrix(dets, store)
    result = davidson_lowest(matrix)
    return BaselineResult("fci", dets, result.energy, result.vector, [(dim, result.energy)])


def hci_run(
    store: IntegralStore,
    sector: tuple[int, int],
    delta: float,
    delta_conv: float = 1e-9,
    max_iterations: int = 200,
) -> BaselineResult:
    """Iterative selection admitting determinants with |H_kl v_k| > delta."""
    if delta <= 0:
        raise ValueError("selection threshold must be positive")
    dets = (hartree_fock(store.norb, *sector),)
    matrix = build_interaction_matrix(dets, store)
    vector = np.ones(1)
    energy = float(matrix.matrix[0, 0])
    trace = [(1, energy)]
    for _ in range(max_iterations):
        in_set = set(dets)
        additions: list[Determinant] = []
        for k, parent in enumerate(dets):
            weight = abs(vector[k])
            if weight == 0.0:
                continue
            for cand, info in enumerate_connected(parent):
                if cand in in_set:
                    continue
                if abs(element_from_info(parent, info, store)) * weight > delta:
                    in_set.add(cand)
                    additions.append(cand)
        if not additions:
            break
        matrix = extend_interaction_matrix(matrix, additions, store)
        dets = matrix.dets
        result = davidson_lowest(matrix, v0=np.concatenate([vector, np.zeros(len(additions))]))
        e_new, vector = result.energy, result.vector
        trace.append((len(dets), e_new))
        converged = abs(energy - e_new) <= delta_conv
        energy = e_new
        if converged:
            break
    return BaselineResult("hci", dets, energy, vector, trace)


def _external_amplitudes(dets, vector, store):
    """Sum of v_k <ext|H|parent_k> per connected external determinant."""
    in_set = set(dets)
    amp: dict[Determinant, float] = {}
    for k, parent in enumerate(dets):
        vk = vector[k]
        if vk == 0.0:
            continue
        for cand, info in enumerate_connected(parent):
            if cand in in_set:
                continue
            value = element_from_info(parent, info, store)
            if value != 0.0:
                amp[cand] = amp.get(cand, 0.0) + vk * value
    return amp


def cipsi_run(
    store: IntegralStore,
    sector: tuple[int, int],
    n_select: int,
    max_dim: int,
) -> BaselineResult:
    """Iteratively add the externals with the largest perturbative rank.

    Rank = |<ext|H|Psi>| / (<ext|H|ext> - E); near-zero denominators mark
    the candidate as an intruder (rank infinity) instead of dividing.
    """
    if n_select < 1:
        raise ValueError("n_select must be >= 1")
    dets = (hartree_fock(store.norb, *sector),)
    matrix = build_interaction_matrix(dets, store)
    vector = np.ones(1)
    energy = float(matrix.matrix[0, 0])
    trace = [(1, energy)]
    intruders = 0
    while len(dets) < max_dim:
        amp = _external_amplitudes(dets, vector, store)
        if not amp:
            break
        scored = []
        for cand in sorted(amp, key=Determinant.key):
            denom = diagonal_element(cand, store) - energy
            if abs(denom) < 1e-10:
                intruders += 1
                scored.append((np.inf, cand))
            else:
                scored.append((abs(amp[cand]) / denom, cand))
        scored.sort(key=lambda item: (-item[0], item[1].key()))
        room = max_dim - len(dets)
        additions = [cand for _, cand in scored[: min(n_select, room)]]
        matrix = extend_interaction_matrix(matrix, additions, store)
        dets = matrix.dets
        result = davidson_lowest(matrix, v0=np.concatenate([vector, np.zeros(len(additions))]))
        energy, vector = result.energy, result.vector
        trace.append((len(dets), energy))
    return BaselineResult("cipsi", dets, energy, vector, trace, intruders)


def dim_at_threshold(trace, e_ref: float, threshold: float = 1e-3):
    """Smallest recorded |D| whose energy is within ``threshold`` of ``e_ref``."""
    for dim, energy in trace:
        if energy - e_ref <= threshold:
            return dim
    return None
