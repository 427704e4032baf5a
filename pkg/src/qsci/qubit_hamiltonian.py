"""Fermion-to-qubit mapping and Pauli-word algebra.

Pauli words are held in symplectic form: masks (x, z) over 2M qubits
with qubit j = spatial orbital j (alpha block) or M + j (beta block),
matching the determinant bitstring layout.  The word W(x, z) is the
actual Pauli operator with Y on bits set in both masks, so
``W|b> = i^popcount(x & z) * (-1)^popcount(b & z) |b XOR x>``.

Mapped molecular Hamiltonians come out real-symmetric; coefficients are
validated real and merged, with |h| < 1e-12 pruned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .determinants import Determinant, to_index
from .errors import CapabilityError
from .integrals import IntegralStore

JW_MAX_ORBITALS = 32  # 2M <= 64 qubits
COEFF_PRUNE = 1e-12

_PHASES = (1.0, 1.0j, -1.0, -1.0j)


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli word over ``n_qubits`` qubits."""

    coefficient: float
    x: int
    z: int
    n_qubits: int

    @property
    def string(self) -> str:
        return "".join(
            "IXZY"[(self.x >> j & 1) + 2 * (self.z >> j & 1)]
            for j in range(self.n_qubits)
        )

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def y_count(self) -> int:
        return (self.x & self.z).bit_count()


def term_from_string(coefficient: float, word: str) -> PauliTerm:
    x = z = 0
    for j, c in enumerate(word):
        if c in "XY":
            x |= 1 << j
        if c in "ZY":
            z |= 1 << j
        if c not in "IXYZ":
            raise ValueError(f"invalid Pauli letter {c!r}")
    return PauliTerm(coefficient, x, z, len(word))


@dataclass(frozen=True)
class PauliSum:
    """Merged, pruned, deterministically ordered weighted Pauli words."""

    terms: tuple[PauliTerm, ...]
    n_qubits: int

    def __len__(self) -> int:
        return len(self.terms)

    def coefficients(self) -> np.ndarray:
        return np.array([t.coefficient for t in self.terms])

    def sampling_terms(self) -> tuple[PauliTerm, ...]:
        """Non-identity terms; the identity only shifts a global phase."""
        return tuple(t for t in self.terms if not t.is_identity)


def _word_product(c1, x1, z1, c2, x2, z2):
    x3, z3 = x1 ^ x2, z1 ^ z2
    exp = ((x1 & z1).bit_count() + (x2 & z2).bit_count() - (x3 & z3).bit_count()) % 4
    sign = -1.0 if (z1 & x2).bit_count() & 1 else 1.0
    return c1 * c2 * sign * _PHASES[exp], x3, z3


def _lower_mask(j: int) -> int:
    return (1 << j) - 1


def _ladder(j: int, dagger: bool):
    # a_j  = Z_{<j} (X_j + iY_j)/2 ; a_j^dag has the conjugate Y part.
    sign = -0.5j if dagger else 0.5j
    return [
        (0.5, 1 << j, _lower_mask(j)),
        (sign, 1 << j, _lower_mask(j) | 1 << j),
    ]


def _product_chain(chains):
    terms = [(1.0, 0, 0)]
    for chain in chains:
        terms = [
            _word_product(c1, x1, z1, c2, x2, z2)
            for (c1, x1, z1) in terms
            for (c2, x2, z2) in chain
        ]
    return terms


def jordan_wigner(store: IntegralStore) -> PauliSum:
    """Map the second-quantized Hamiltonian to a weighted Pauli sum.

    Restricted to the simulator-compatible range M <= 32.  The sector
    spectrum of the result matches the determinant-space Hamiltonian.
    """
    m = store.norb
    if m > JW_MAX_ORBITALS:
        raise CapabilityError(f"{2 * m} qubits exceed the {2 * JW_MAX_ORBITALS}-qubit mapping cap")
    n_qubits = 2 * m
    acc: dict[tuple[int, int], complex] = {(0, 0): complex(store.core_energy)}

    def accumulate(weight, chains):
        for coeff, x, z in _product_chain(chains):
            key = (x, z)
            acc[key] = acc.get(key, 0.0) + weight * coeff

    for p in range(m):
        for q in range(m):
            h_pq = store.h[p, q]
            if h_pq == 0.0:
                continue
            for spin_offset in (0, m):
                accumulate(
                    h_pq,
                    [_ladder(p + spin_offset, True), _ladder(q + spin_offset, False)],
                )
    for p in range(m):
        for q in range(m):
            for r in range(m):
                for s in range(m):
                    g_pqrs = store.two_body(p, q, r, s)
                    if g_pqrs == 0.0:
                        continue
                    for so1 in (0, m):
                        for so2 in (0, m):
                            accumulate(
                                0.5 * g_pqrs,
                                [
                                    _ladder(p + so1, True),
                                    _ladder(r + so2, True),
                                    _ladder(s + so2, False),
                                    _ladder(q + so1, False),
                                ],
                            )

    terms = []
    for (x, z), coeff in acc.items():
        if abs(coeff) < COEFF_PRUNE:
            continue
        if abs(coeff.imag) > 1e-10:
            raise ValueError("mapped Hamiltonian has a non-real coefficient; integrals not symmetric")
        terms.append(PauliTerm(float(coeff.real), x, z, n_qubits))
    terms.sort(key=lambda t: (t.x, t.z))
    return PauliSum(tuple(terms), n_qubits)


def l1_norm(psum: PauliSum) -> float:
    """Sum of |h_j| over non-identity terms (identity is pure phase)."""
    weights = np.array([abs(t.coefficient) for t in psum.sampling_terms()])
    return float(np.sum(weights)) if len(weights) else 0.0


def term_action_phases(term: PauliTerm, indices: np.ndarray) -> np.ndarray:
    """Phase of W|b> for each basis index b (the target is b XOR x)."""
    parity = np.bitwise_count(np.bitwise_and(indices, np.int64(term.z))) & 1
    return _PHASES[term.y_count % 4] * (1.0 - 2.0 * parity)


def apply_pauli_sum(psum: PauliSum, vec: np.ndarray) -> np.ndarray:
    """Dense action of the summed operator on a statevector."""
    dim = len(vec)
    idx = np.arange(dim, dtype=np.int64)
    out = np.zeros_like(vec, dtype=complex)
    for term in psum.terms:
        src = idx ^ term.x
        out += term.coefficient * term_action_phases(term, src) * vec[src]
    return out


def expectation(psum: PauliSum, vec: np.ndarray) -> float:
    """<vec|H|vec>; real for Hermitian sums."""
    return float(np.real(np.vdot(vec, apply_pauli_sum(psum, vec))))


def sector_matrix(psum: PauliSum, dets) -> np.ndarray:
    """Dense Hamiltonian block over the given determinant basis."""
    dets = list(dets)
    index = {to_index(d): k for k, d in enumerate(dets)}
    k_dim = len(dets)
    mat = np.zeros((k_dim, k_dim), dtype=complex)
    basis = np.array([to_index(d) for d in dets], dtype=np.int64)
    for term in psum.terms:
        phases = term.coefficient * term_action_phases(term, basis)
        targets = basis ^ term.x
        for k in range(k_dim):
            l = index.get(int(targets[k]))
            if l is not None:
                mat[l, k] += phases[k]
    if np.max(np.abs(mat.imag)) > 1e-10:
        raise ValueError("sector block is not real; inconsistent Hamiltonian")
    return np.ascontiguousarray(mat.real)


def to_text(psum: PauliSum) -> str:
    """One `coefficient word` pair per line (debug/interchange dump)."""
    return "\n".join(f"{t.coefficient!r} {t.string}" for t in psum.terms) + "\n"


def from_text(text: str) -> PauliSum:
    terms = []
    n_qubits = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        coeff_str, word = line.split()
        term = term_from_string(float(coeff_str), word)
        if n_qubits is None:
            n_qubits = term.n_qubits
        elif n_qubits != term.n_qubits:
            raise ValueError("inconsistent word lengths in Pauli dump")
        terms.append(term)
    if n_qubits is None:
        raise ValueError("empty Pauli dump")
    terms.sort(key=lambda t: (t.x, t.z))
    return PauliSum(tuple(terms), n_qubits)
