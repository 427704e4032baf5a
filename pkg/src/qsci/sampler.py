"""Occupancy-guided, symmetry-preserved configuration sampling.

The subspace grows in rounds: measured orbital occupancies steer the
draw of single and double excitations away from high-weight
configurations, candidates are ranked by sampling probability times
coupling magnitude, the interaction matrix is extended by blocks, and
the eigenproblem is re-solved warm-started from the previous vector.
Small-coefficient configurations are filtered after each round.

Every excitation stays inside the (N_alpha, N_beta) particle sector by
construction; harvested raw bitstrings are sector-checked before entry.
All randomness is derived from the config seed by counters, so runs,
reruns, resumes, and any worker count agree exactly.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

import numpy as np

from .determinants import (
    ALPHA,
    BETA,
    Determinant,
    apply_excitation,
    from_bitstring,
    hartree_fock,
)
from .eigensolver import davidson_lowest
from .errors import ConvergenceError
from .evolution_sim import MeasurementSet
from .integrals import IntegralStore
from .seeding import derive_rng
from .slater_condon import (
    InteractionMatrix,
    build_interaction_matrix,
    extend_interaction_matrix,
    matrix_element,
)


@dataclass
class OccupancyDistribution:
    """Mean occupation per spatial orbital and spin, in [0, 1]."""

    f_alpha: np.ndarray
    f_beta: np.ndarray


@dataclass
class SamplerConfig:
    d_max: int = 50_000
    n_rounds: int = 10
    n_samples: int = 100
    eps_screen: float = 1e-2
    eps_wf: float = 1e-5
    delta_conv: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if min(self.d_max, self.n_rounds, self.n_samples) < 1:
            raise ValueError("d_max, n_rounds, n_samples must be positive")
        if self.eps_screen <= 0 or self.eps_wf <= 0 or self.delta_conv <= 0:
            raise ValueError("thresholds must be positive")
        if not self.eps_wf < self.eps_screen:
            raise ValueError("eps_wf must be below eps_screen (filtering may not delete screened parents)")


@dataclass
class TraceRecord:
    step: int
    round: int
    phase: str  # init | harvest | expand | filter
    dim: int
    energy: float
    delta: float
    wall_time: float = 0.0


@dataclass
class SubspaceState:
    dets: tuple[Determinant, ...]
    matrix: InteractionMatrix
    energy: float
    vector: np.ndarray
    reference: Determinant
    sector: tuple[int, int]
    counter: int = 0
    delta: float = 1.0
    pending_solve: bool = False
    trace: list[TraceRecord] = field(default_factory=list)
    # (dets, energy, vector) captured after each measurement-set pass.
    snapshots: list[tuple[tuple[Determinant, ...], float, np.ndarray]] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.dets)


def occupancy_distribution(ms: MeasurementSet, norb: int) -> OccupancyDistribution:
    """Per-spin-orbital mean occupancy over ALL raw shots."""
    if ms.n_qubits != 2 * norb:
        raise ValueError(f"shots carry {ms.n_qubits} qubits, expected {2 * norb}")
    bits = np.frombuffer("".join(ms.bitstrings).encode("ascii"), dtype=np.uint8)
    bits = (bits - ord("0")).reshape(ms.n_shots, 2 * norb)
    f = bits.mean(axis=0)
    return OccupancyDistribution(f[:norb].copy(), f[norb:].copy())


def harvest_valid(ms: MeasurementSet, sector: tuple[int, int]) -> list[Determinant]:
    """Decode shots whose per-spin counts match the sector, deduplicated.

    Ordered by shot frequency (descending), ties by bit pattern, so a
    subspace cap truncates to the most-sampled configurations.
    """
    norb = ms.n_qubits // 2
    counts: dict[str, int] = {}
    for b in ms.bitstrings:
        counts[b] = counts.get(b, 0) + 1
    out = []
    for b, c in counts.items():
        det = from_bitstring(b, norb)
        if det.sector == sector:
            out.append((c, det))
    out.sort(key=lambda item: (-item[0], item[1].key()))
    return [det for _, det in out]


def _draw(rng: np.random.Generator, items: list[int], weights: np.ndarray) -> tuple[int, float]:
    """One index from ``items`` with probability proportional to ``weights``.

    All-zero weights fall back to uniform (reachable under extreme noise).
    Returns (item, probability of that draw).
    """
    total = float(np.sum(weights))
    if total <= 0.0:
        j = int(rng.integers(0, len(items)))
        return items[j], 1.0 / len(items)
    cdf = np.cumsum(weights)
    u = rng.random() * total
    j = min(int(np.searchsorted(cdf, u, side="right")), len(items) - 1)
    return items[j], float(weights[j]) / total


def propose_candidates(
    parent: Determinant, occ: OccupancyDistribution, rng: np.random.Generator
) -> list[tuple[Determinant, float]]:
    """Up to five excitations of ``parent`` with their draw probabilities.

    Hole indices are drawn proportional to the measured occupancy
    restricted to the parent's occupied orbitals; particle indices
    proportional to one minus the occupancy over its virtuals
    (restriction and renormalization per channel).  Same-spin doubles
    draw holes and particles without replacement; opposite-spin doubles
    may repeat spatial indices across channels.  A channel without
    occupied or virtual orbitals contributes no candidate.
    """
    f = (occ.f_alpha, occ.f_beta)
    cands: list[tuple[Determinant, float]] = []
    singles: dict[int, tuple] = {}
    for spin in (ALPHA, BETA):
        occ_list = parent.occupied(spin)
        virt_list = parent.virtual(spin)
        hole_w = np.asarray(f[spin])[occ_list] if occ_list else None
        part_w = 1.0 - np.asarray(f[spin])[virt_list] if virt_list else None
        if occ_list and virt_list:
            h, ph = _draw(rng, occ_list, hole_w)
            p, pp = _draw(rng, virt_list, part_w)
            det, _ = apply_excitation(parent, [(spin, h)], [(spin, p)])
            cands.append((det, ph * pp))
        if len(occ_list) >= 2 and len(virt_list) >= 2:
            h1, p1w = _draw(rng, occ_list, hole_w)
            rest_occ = [o for o in occ_list if o != h1]
            h2, p2w = _draw(rng, rest_occ, np.asarray(f[spin])[rest_occ])
            v1, p3w = _draw(rng, virt_list, part_w)
            rest_virt = [o for o in virt_list if o != v1]
            v2, p4w = _draw(rng, rest_virt, 1.0 - np.asarray(f[spin])[rest_virt])
            holes = ((spin, min(h1, h2)), (spin, max(h1, h2)))
            parts = ((spin, min(v1, v2)), (spin, max(v1, v2)))
            det, _ = apply_excitation(parent, holes, parts)
            cands.append((det, p1w * p2w * p3w * p4w))
        singles[spin] = (occ_list, virt_list, hole_w, part_w)
    occ_a, virt_a, hw_a, pw_a = singles[ALPHA]
    occ_b, virt_b, hw_b, pw_b = singles[BETA]
    if occ_a and virt_a and occ_b and virt_b:
        ha, p1 = _draw(rng, occ_a, hw_a)
        hb, p2 = _draw(rng, occ_b, hw_b)
        pa, p3 = _draw(rng, virt_a, pw_a)
        pb, p4 = _draw(rng, virt_b, pw_b)
        det, _ = apply_excitation(parent, [(ALPHA, ha), (BETA, hb)], [(ALPHA, pa), (BETA, pb)])
        cands.append((det, p1 * p2 * p3 * p4))
    return cands


def screen_candidates(
    cands: list[tuple[Determinant, float]],
    parent: Determinant,
    store: IntegralStore,
    n_samples: int,
) -> list[Determinant]:
    """Top ``n_samples`` by probability times |<parent|H|candidate>|.

    Duplicates within the batch keep their best score; ties break by
    determinant bit pattern ascending (deterministic ranking).
    """
    scores: dict[Determinant, float] = {}
    for det, prob in cands:
        d_val = prob * abs(matrix_element(parent, det, store))
        if d_val > scores.get(det, -1.0):
            scores[det] = d_val
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0].key()))
    return [det for det, _ in ranked[:n_samples]]


def _solve(state: SubspaceState, matrix: InteractionMatrix, v0: np.ndarray):
    try:
        return davidson_lowest(matrix, v0=v0)
    except ConvergenceError as err:
        err.state_snapshot = state  # checkpointable context for the caller
        raise


def expand_round(
    state: SubspaceState,
    occ: OccupancyDistribution,
    config: SamplerConfig,
    store: IntegralStore,
    round_index: int = 0,
) -> SubspaceState:
    """One sampling round: propose, screen, extend, re-solve, filter.

    The post-expansion energy never exceeds the pre-expansion energy (up
    to solver tolerance); the coefficient filter afterwards may raise it,
    and the trace records the two legs separately.
    """
    t0 = _time.perf_counter()
    seen = set(state.dets)
    new_dets: list[Determinant] = []
    room = config.d_max - len(state.dets)
    for k, parent in enumerate(state.dets):
        if abs(state.vector[k]) <= config.eps_screen:
            continue
        rng = derive_rng(config.seed, "propose", state.counter, round_index, parent.key())
        batch: list[tuple[Determinant, float]] = []
        for _ in range(config.n_samples):
            batch.extend(propose_candidates(parent, occ, rng))
        for det in screen_candidates(batch, parent, store, config.n_samples):
            if det not in seen and len(new_dets) < room:
                assert det.sector == state.sector
                seen.add(det)
                new_dets.append(det)
    if not new_dets and not state.pending_solve:
        return state

    matrix = extend_interaction_matrix(state.matrix, new_dets, store)
    v0 = np.concatenate([state.vector, np.zeros(len(new_dets))])
    e_old = state.energy
    result = _solve(state, matrix, v0)
    dets = matrix.dets
    energy, vector = result.energy, result.vector
    delta = e_old - energy
    state.trace.append(
        TraceRecord(state.counter, round_index, "expand", len(dets), energy, delta,
                    _time.perf_counter() - t0)
    )

    keep = [
        k
        for k, det in enumerate(dets)
        if abs(vector[k]) > config.eps_wf or det == state.reference
    ]
    if len(keep) < len(dets):
        t1 = _time.perf_counter()
        kept_dets = tuple(dets[k] for k in keep)
        sub = matrix.matrix[keep][:, keep].tocsr()
        sub.sum_duplicates()
        sub.sort_indices()
        matrix = InteractionMatrix(kept_dets, sub)
        vector = vector[keep]
        vector = vector / np.linalg.norm(vector)
        e_filtered = float(vector @ (sub @ vector))
        state.trace.append(
            TraceRecord(state.counter, round_index, "filter", len(kept_dets),
                        e_filtered, energy - e_filtered, _time.perf_counter() - t1)
        )
        dets, energy = kept_dets, e_filtered

    state.dets = dets
    state.matrix = matrix
    state.energy = energy
    state.vector = vector
    state.delta = delta
    state.pending_solve = False
    return state


def initial_state(store: IntegralStore, sector: tuple[int, int]) -> SubspaceState:
    reference = hartree_fock(store.norb, *sector)
    matrix = build_interaction_matrix([reference], store)
    energy = float(matrix.matrix[0, 0])
    state = SubspaceState(
        dets=(reference,),
        matrix=matrix,
        energy=energy,
        vector=np.ones(1),
        reference=reference,
        sector=sector,
    )
    state.trace.append(TraceRecord(0, -1, "init", 1, energy, 0.0))
    return state


def _harvest_into(state: SubspaceState, ms: MeasurementSet, config: SamplerConfig, store):
    t0 = _time.perf_counter()
    seen = set(state.dets)
    room = config.d_max - len(state.dets)
    additions = []
    for det in harvest_valid(ms, state.sector):
        if det not in seen and len(additions) < room:
            seen.add(det)
            additions.append(det)
    if additions:
        state.matrix = extend_interaction_matrix(state.matrix, additions, store)
        state.dets = state.matrix.dets
        state.vector = np.concatenate([state.vector, np.zeros(len(additions))])
        state.pending_solve = True
    state.trace.append(
        TraceRecord(state.counter, -1, "harvest", len(state.dets), state.energy, 0.0,
                    _time.perf_counter() - t0)
    )


def run_qsci(
    measurement_sets: list[MeasurementSet],
    config: SamplerConfig,
    store: IntegralStore,
    sector: tuple[int, int],
    *,
    resume: SubspaceState | None = None,
    max_outer_steps: int | None = None,
    on_step=None,
) -> SubspaceState:
    """Drive the sampling loop over measurement sets until converged.

    Iterates the sets cyclically; each pass harvests sector-valid shots,
    computes occupancies, and runs ``n_rounds`` of expansion.  Stops when
    the subspace reaches ``d_max`` or the last round's energy improvement
    falls to ``delta_conv``.  ``resume`` continues a previous state and
    reproduces the uninterrupted trace exactly; ``max_outer_steps`` bounds
    the number of passes (for checkpointing mid-run).  ``on_step`` is
    called with the state after each pass.
    """
    if not measurement_sets:
        raise ValueError("need at least one measurement set")
    state = resume if resume is not None else initial_state(store, sector)
    steps_done = 0
    while len(state.dets) < config.d_max and state.delta > config.delta_conv:
        if max_outer_steps is not None and steps_done >= max_outer_steps:
            break
        ms = measurement_sets[state.counter % len(measurement_sets)]
        _harvest_into(state, ms, config, store)
        occ = occupancy_distribution(ms, store.norb)
        for round_index in range(config.n_rounds):
            state = expand_round(state, occ, config, store, round_index)
        state.counter += 1
        state.snapshots.append((state.dets, state.energy, state.vector.copy()))
        steps_done += 1
        if on_step is not None:
            on_step(state)
    return state
