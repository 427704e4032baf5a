"""Versioned binary checkpoints for the sampling loop.

Length-prefixed little-endian layout behind an 8-byte magic header and
a format version; incompatible versions refuse to load.  A checkpoint
restores everything the loop needs to continue exactly as if it had
never stopped: determinants, eigenpair, convergence delta, pass counter,
the trace so far, and the per-pass snapshots.  RNG streams are derived
from (seed, counter, ...) tags, so the counter is the stream position.
"""

from __future__ import annotations

import struct

import numpy as np

from .determinants import Determinant
from .errors import CheckpointError
from .integrals import IntegralStore
from .sampler import SubspaceState, TraceRecord
from .slater_condon import build_interaction_matrix

MAGIC = b"QSCICKPT"
VERSION = 1

_PHASES = ("init", "harvest", "expand", "filter")


def _pack_dets(dets) -> bytes:
    out = [struct.pack("<Q", len(dets))]
    for d in dets:
        out.append(struct.pack("<QQ", d.alpha, d.beta))
    return b"".join(out)


def _pack_vector(vec) -> bytes:
    arr = np.ascontiguousarray(vec, dtype=np.float64)
    return struct.pack("<Q", len(arr)) + arr.tobytes()


def save_checkpoint(path, state: SubspaceState) -> None:
    parts = [
        MAGIC,
        struct.pack("<I", VERSION),
        struct.pack("<III", state.reference.norb, *state.sector),
        struct.pack("<QQ", state.reference.alpha, state.reference.beta),
        struct.pack("<Qdd", state.counter, state.delta, state.energy),
        _pack_dets(state.dets),
        _pack_vector(state.vector),
        struct.pack("<Q", len(state.trace)),
    ]
    for rec in state.trace:
        parts.append(
            struct.pack(
                "<iiBQddd",
                rec.step,
                rec.round,
                _PHASES.index(rec.phase),
                rec.dim,
                rec.energy,
                rec.delta,
                rec.wall_time,
            )
        )
    parts.append(struct.pack("<Q", len(state.snapshots)))
    for dets, energy, vector in state.snapshots:
        parts.append(_pack_dets(dets))
        parts.append(struct.pack("<d", energy))
        parts.append(_pack_vector(vector))
    with open(path, "wb") as handle:
        handle.write(b"".join(parts))


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.offset = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.offset + size > len(self.blob):
            raise CheckpointError("truncated checkpoint")
        values = struct.unpack_from(fmt, self.blob, self.offset)
        self.offset += size
        return values

    def dets(self, norb: int) -> tuple[Determinant, ...]:
        (count,) = self.take("<Q")
        return tuple(Determinant(*self.take("<QQ"), norb) for _ in range(count))

    def vector(self) -> np.ndarray:
        (count,) = self.take("<Q")
        size = 8 * count
        if self.offset + size > len(self.blob):
            raise CheckpointError("truncated checkpoint vector")
        arr = np.frombuffer(self.blob, dtype="<f8", count=count, offset=self.offset).copy()
        self.offset += size
        return arr


def load_checkpoint(path, store: IntegralStore) -> SubspaceState:
    """Rebuild a state; the interaction matrix is reassembled from D."""
    with open(path, "rb") as handle:
        blob = handle.read()
    if blob[:8] != MAGIC:
        raise CheckpointError("not a checkpoint file (bad magic)")
    reader = _Reader(blob)
    reader.offset = 8
    (version,) = reader.take("<I")
    if version != VERSION:
        raise CheckpointError(f"checkpoint version {version} is not supported (expected {VERSION})")
    norb, n_alpha, n_beta = reader.take("<III")
    if norb != store.norb:
        raise CheckpointError(f"checkpoint norb {norb} does not match integrals ({store.norb})")
    ref_alpha, ref_beta = reader.take("<QQ")
    counter, delta, energy = reader.take("<Qdd")
    dets = reader.dets(norb)
    vector = reader.vector()
    if len(vector) != len(dets):
        raise CheckpointError("vector length does not match determinant count")
    (n_trace,) = reader.take("<Q")
    trace = []
    for _ in range(n_trace):
        step, rnd, phase, dim, e, d, wall = reader.take("<iiBQddd")
        trace.append(TraceRecord(step, rnd, _PHASES[phase], dim, e, d, wall))
    (n_snap,) = reader.take("<Q")
    snapshots = []
    for _ in range(n_snap):
        s_dets = reader.dets(norb)
        (s_energy,) = reader.take("<d")
        snapshots.append((s_dets, s_energy, reader.vector()))
    state = SubspaceState(
        dets=dets,
        matrix=build_interaction_matrix(dets, store),
        energy=energy,
        vector=vector,
        reference=Determinant(ref_alpha, ref_beta, norb),
        sector=(n_alpha, n_beta),
        counter=counter,
        delta=delta,
        trace=trace,
        snapshots=snapshots,
    )
    return state
