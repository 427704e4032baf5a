"""Stochastic time-evolution circuits on a dense statevector backend.

Stands in for the quantum device: samples randomized product-formula
circuits term by term with probability |h_j| / lambda, applies the
rotations to a dense statevector (cap 24 qubits), and draws measurement
shots from |psi|^2, optionally replacing shots with uniform random
bitstrings to emulate depolarizing readout drift.

Sampling keeps the unnormalized |h_j| weights and inverts the CDF
against u * lambda, so weight * sign reconstructs each h_j exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .determinants import Determinant, to_index
from .errors import CapabilityError
from .qubit_hamiltonian import PauliSum, PauliTerm, term_action_phases
from .parallel import parallel_map
from .seeding import derive_rng

QUBIT_CAP = 24


@dataclass(frozen=True)
class QDriftCircuit:
    """Sampled rotation sequence approximating exp(-iHt)."""

    ham: PauliSum
    term_indices: np.ndarray  # into ham.sampling_terms()
    angles: np.ndarray  # lambda * t * sgn(h_j) / N per rotation
    time: float
    n_rotations: int

    @property
    def rotations(self) -> list[tuple[PauliTerm, float]]:
        terms = self.ham.sampling_terms()
        return [(terms[j], float(a)) for j, a in zip(self.term_indices, self.angles)]


def qdrift_length(lam: float, time: float, epsilon: float) -> int:
    """N = ceil(2 lambda^2 t^2 / epsilon)."""
    if epsilon <= 0:
        raise ValueError("precision must be positive")
    return math.ceil(2.0 * lam * lam * time * time / epsilon)


def sample_qdrift(
    ham: PauliSum,
    time: float,
    rng: np.random.Generator,
    *,
    epsilon: float | None = None,
    n_rotations: int | None = None,
) -> QDriftCircuit:
    """Draw N terms i.i.d. with p_j = |h_j| / lambda.

    Exactly one of ``epsilon`` (target channel precision) or
    ``n_rotations`` must be given.  A Hamiltonian with no non-identity
    terms yields an empty circuit.
    """
    if (epsilon is None) == (n_rotations is None):
        raise ValueError("specify exactly one of epsilon or n_rotations")
    terms = ham.sampling_terms()
    weights = np.array([abs(t.coefficient) for t in terms])
    lam = float(np.sum(weights)) if len(weights) else 0.0
    if lam == 0.0:
        return QDriftCircuit(ham, np.empty(0, dtype=np.int64), np.empty(0), time, 0)
    n = n_rotations if n_rotations is not None else qdrift_length(lam, time, epsilon)
    if n < 0:
        raise ValueError("rotation count must be non-negative")
    cdf = np.cumsum(weights)
    draws = rng.random(n) * cdf[-1]
    indices = np.searchsorted(cdf, draws, side="right").astype(np.int64)
    signs = np.array([math.copysign(1.0, terms[j].coefficient) for j in indices])
    angles = lam * time * signs / n if n else np.empty(0)
    return QDriftCircuit(ham, indices, angles, time, n)


def prepare_reference(det: Determinant) -> np.ndarray:
    """Computational-basis statevector |b(det)>."""
    n_qubits = 2 * det.norb
    if n_qubits > QUBIT_CAP:
        raise CapabilityError(f"{n_qubits} qubits exceed the {QUBIT_CAP}-qubit statevector cap")
    vec = np.zeros(1 << n_qubits, dtype=complex)
    vec[to_index(det)] = 1.0
    return vec


def apply_pauli_rotation(vec: np.ndarray, term: PauliTerm, theta: float) -> np.ndarray:
    """exp(-i theta W) |vec> = cos(theta) vec - i sin(theta) W vec."""
    if 1 << term.n_qubits != len(vec):
        raise ValueError("Pauli word and statevector disagree on qubit count")
    if theta == 0.0:
        return vec.copy()
    src = np.arange(len(vec), dtype=np.int64) ^ term.x
    w_vec = term_action_phases(term, src) * vec[src]
    return math.cos(theta) * vec - 1j * math.sin(theta) * w_vec


def run_circuit(circuit: QDriftCircuit, vec: np.ndarray) -> np.ndarray:
    terms = circuit.ham.sampling_terms()
    out = vec
    for j, angle in zip(circuit.term_indices, circuit.angles):
        out = apply_pauli_rotation(out, terms[j], float(angle))
    return out


def measure_indices(vec: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Draw basis indices from |vec|^2 by single-pass CDF inversion."""
    probs = np.abs(vec) ** 2
    cdf = np.cumsum(probs)
    draws = rng.random(shots) * cdf[-1]
    return np.searchsorted(cdf, draws, side="right").astype(np.int64)


def index_to_bitstring(index: int, n_qubits: int) -> str:
    return "".join("1" if index >> j & 1 else "0" for j in range(n_qubits))


@dataclass
class MeasurementSet:
    """Raw shots for one evolution time (possibly symmetry violating)."""

    time: float
    bitstrings: list[str]
    n_qubits: int

    def __post_init__(self):
        if not self.bitstrings:
            raise ValueError("a measurement set needs at least one shot")
        for b in self.bitstrings:
            if len(b) != self.n_qubits or set(b) - {"0", "1"}:
                raise ValueError(f"shot {b!r} is not a {self.n_qubits}-bit string")

    @property
    def n_shots(self) -> int:
        return len(self.bitstrings)


def _instance_shots(args) -> list[int]:
    (ham, ref_det, time, step, instance, shots, n_rotations, epsilon, p_dep, seed) = args
    circuit = sample_qdrift(
        ham,
        time,
        derive_rng(seed, "qdrift", step, instance),
        epsilon=epsilon,
        n_rotations=n_rotations,
    )
    vec = run_circuit(circuit, prepare_reference(ref_det))
    indices = measure_indices(vec, shots, derive_rng(seed, "measure", step, instance))
    noise_rng = derive_rng(seed, "noise", step, instance)
    replace = noise_rng.random(shots) < p_dep
    uniform = noise_rng.integers(0, 1 << (2 * ref_det.norb), size=shots, dtype=np.int64)
    return list(np.where(replace, uniform, indices))


def evolve_and_measure(
    ham: PauliSum,
    ref_det: Determinant,
    tau: float,
    k_steps: int,
    instances: int,
    shots: int,
    *,
    n_rotations: int | None = None,
    epsilon: float | None = None,
    p_dep: float = 0.0,
    seed: int = 0,
) -> list[MeasurementSet]:
    """Fresh circuits per (step, instance); shots pooled per step t = k tau.

    A shot is replaced by a uniform random bitstring with probability
    ``p_dep``.  Instances are independent tasks with derived seeds and
    merge in instance order, so results do not depend on the worker
    count.  The noise stream is separate from the measurement stream:
    runs differing only in ``p_dep`` share identical clean shots.
    """
    if k_steps < 1 or instances < 1 or shots < 1:
        raise ValueError("k_steps, instances, and shots must be >= 1")
    if not 0.0 <= p_dep <= 1.0:
        raise ValueError("p_dep must lie in [0, 1]")
    if 2 * ref_det.norb > QUBIT_CAP:
        raise CapabilityError(f"{2 * ref_det.norb} qubits exceed the {QUBIT_CAP}-qubit statevector cap")
    n_qubits = 2 * ref_det.norb
    sets = []
    for step in range(1, k_steps + 1):
        time = step * tau
        tasks = [
            (ham, ref_det, time, step, i, shots, n_rotations, epsilon, p_dep, seed)
            for i in range(instances)
        ]
        pooled: list[str] = []
        for shot_indices in parallel_map(_instance_shots, tasks):
            pooled.extend(index_to_bitstring(int(i), n_qubits) for i in shot_indices)
        sets.append(MeasurementSet(time, pooled, n_qubits))
    return sets
