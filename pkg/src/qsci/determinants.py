"""Bitmask Slater determinants, excitations, and fermionic phases.

A determinant is a pair of occupation masks over M spatial orbitals, one
per spin channel; bit i set means spatial orbital i is occupied by an
electron of that spin.  The text form is spin-blocked: characters 0..M-1
are the alpha occupations, M..2M-1 the beta occupations, with character
position equal to orbital index.  Phases follow the maximum-coincidence
convention, evaluated within each spin channel (the blocked ordering
makes cross-channel string contributions cancel pairwise).

All operations are pure functions on immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, NamedTuple, Sequence

from .errors import BitstringFormatError, InvalidExcitationError

ALPHA = 0
BETA = 1

MAX_ORBITALS = 64


@dataclass(frozen=True, slots=True)
class Determinant:
    """Occupation bitmasks (alpha, beta) over ``norb`` spatial orbitals."""

    alpha: int
    beta: int
    norb: int

    def __post_init__(self):
        if not 1 <= self.norb <= MAX_ORBITALS:
            raise ValueError(f"norb must be in [1, {MAX_ORBITALS}], got {self.norb}")
        full = (1 << self.norb) - 1
        if self.alpha & ~full or self.beta & ~full:
            raise ValueError("occupation mask sets bits beyond norb")

    @property
    def n_alpha(self) -> int:
        return self.alpha.bit_count()

    @property
    def n_beta(self) -> int:
        return self.beta.bit_count()

    @property
    def sector(self) -> tuple[int, int]:
        return (self.n_alpha, self.n_beta)

    def spin_mask(self, spin: int) -> int:
        return self.alpha if spin == ALPHA else self.beta

    def occupied(self, spin: int) -> list[int]:
        return _bits(self.spin_mask(spin), self.norb)

    def virtual(self, spin: int) -> list[int]:
        mask = self.spin_mask(spin)
        return [i for i in range(self.norb) if not mask >> i & 1]

    def key(self) -> int:
        """Total order on determinants: the measurement-bitstring integer."""
        return self.alpha | self.beta << self.norb


class ExcitationInfo(NamedTuple):
    """Degree, (spin, orbital) holes/particles, and fermionic sign.

    Holes pair with particles positionally.  ``degree > 2`` is a sentinel:
    the pair is not connected by any particle-conserving single or double
    excitation (matrix elements vanish); hole/particle lists are then empty.
    """

    degree: int
    holes: tuple[tuple[int, int], ...]
    particles: tuple[tuple[int, int], ...]
    phase: int


_IDENTITY_EXCITATION = ExcitationInfo(0, (), (), 1)
_SENTINEL_DEGREE = 3


def _bits(mask: int, norb: int) -> list[int]:
    return [i for i in range(norb) if mask >> i & 1]


def from_bitstring(bits: str, norb: int) -> Determinant:
    """Decode a spin-blocked 2M-character 0/1 string."""
    if len(bits) != 2 * norb:
        raise BitstringFormatError(
            f"expected {2 * norb} characters for {norb} orbitals, got {len(bits)}"
        )
    alpha = beta = 0
    for i, c in enumerate(bits):
        if c == "1":
            if i < norb:
                alpha |= 1 << i
            else:
                beta |= 1 << (i - norb)
        elif c != "0":
            raise BitstringFormatError(f"invalid character {c!r} in bitstring")
    return Determinant(alpha, beta, norb)


def to_bitstring(det: Determinant) -> str:
    m = det.norb
    return "".join(
        "1" if (det.alpha if i < m else det.beta) >> (i % m) & 1 else "0"
        for i in range(2 * m)
    )


def to_index(det: Determinant) -> int:
    """Statevector basis index of the determinant (qubit j = bit j)."""
    return det.alpha | det.beta << det.norb


def from_index(index: int, norb: int) -> Determinant:
    mask = (1 << norb) - 1
    return Determinant(index & mask, index >> norb & mask, norb)


def hartree_fock(norb: int, n_alpha: int, n_beta: int) -> Determinant:
    """Lowest ``n_alpha``/``n_beta`` orbitals occupied (aufbau filling)."""
    if n_alpha > norb or n_beta > norb:
        raise ValueError("electron count exceeds orbital count")
    return Determinant((1 << n_alpha) - 1, (1 << n_beta) - 1, norb)


def sector_dimension(norb: int, n_alpha: int, n_beta: int) -> int:
    """Number of determinants with the given per-spin electron counts."""
    return math.comb(norb, n_alpha) * math.comb(norb, n_beta)


def enumerate_sector(norb: int, n_alpha: int, n_beta: int) -> Iterator[Determinant]:
    """All determinants of the sector, beta-major then alpha, ascending key."""
    alphas = [sum(1 << i for i in occ) for occ in combinations(range(norb), n_alpha)]
    betas = [sum(1 << i for i in occ) for occ in combinations(range(norb), n_beta)]
    alphas.sort()
    betas.sort()
    for b in betas:
        for a in alphas:
            yield Determinant(a, b, norb)


def _single_phase(mask: int, hole: int, particle: int) -> int:
    """Sign from occupied orbitals strictly between hole and particle."""
    lo, hi = (hole, particle) if hole < particle else (particle, hole)
    between = mask & ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1)
    return -1 if between.bit_count() & 1 else 1


def _channel_excitation(mask1: int, mask2: int, norb: int):
    """Holes, particles (sorted), and phase for one spin channel.

    Returns None when the channel is not particle conserving.
    """
    diff = mask1 ^ mask2
    holes = _bits(mask1 & diff, norb)
    parts = _bits(mask2 & diff, norb)
    if len(holes) != len(parts):
        return None
    phase = 1
    mask = mask1
    for h, p in zip(holes, parts):
        phase *= _single_phase(mask, h, p)
        mask = mask & ~(1 << h) | 1 << p
    return holes, parts, phase


def excitation_between(d1: Determinant, d2: Determinant) -> ExcitationInfo:
    """Classify how ``d2`` differs from ``d1``.

    Holes are sorted ascending per channel (alpha first), particles pair
    with them positionally; the phase is the product of
    maximum-coincidence line-up signs accumulated channel by channel.
    """
    if d1.norb != d2.norb:
        raise ValueError("determinants have different orbital counts")
    xor_a = d1.alpha ^ d2.alpha
    xor_b = d1.beta ^ d2.beta
    if not xor_a and not xor_b:
        return _IDENTITY_EXCITATION
    total = xor_a.bit_count() + xor_b.bit_count()
    if total > 4:
        return ExcitationInfo(max(_SENTINEL_DEGREE, (total + 1) // 2), (), (), 1)
    chan_a = _channel_excitation(d1.alpha, d2.alpha, d1.norb)
    chan_b = _channel_excitation(d1.beta, d2.beta, d1.norb)
    if chan_a is None or chan_b is None:
        return ExcitationInfo(_SENTINEL_DEGREE, (), (), 1)
    holes = [(ALPHA, h) for h in chan_a[0]] + [(BETA, h) for h in chan_b[0]]
    parts = [(ALPHA, p) for p in chan_a[1]] + [(BETA, p) for p in chan_b[1]]
    return ExcitationInfo(len(holes), tuple(holes), tuple(parts), chan_a[2] * chan_b[2])


def apply_excitation(
    det: Determinant,
    holes: Sequence[tuple[int, int]],
    particles: Sequence[tuple[int, int]],
) -> tuple[Determinant, int]:
    """Clear the holes and set the particles, returning (new det, phase).

    Holes and particles pair positionally and are applied in order; the
    phase matches ``excitation_between(det, result)`` when the lists are
    sorted the way that function reports them.
    """
    if len(holes) != len(particles):
        raise InvalidExcitationError("hole and particle lists differ in length")
    masks = [det.alpha, det.beta]
    phase = 1
    for (hs, h), (ps, p) in zip(holes, particles):
        if hs != ps:
            raise InvalidExcitationError("hole and particle must share a spin channel")
        if not masks[hs] >> h & 1:
            raise InvalidExcitationError(f"hole orbital {h} (spin {hs}) is not occupied")
        if masks[ps] >> p & 1:
            raise InvalidExcitationError(f"particle orbital {p} (spin {ps}) is occupied")
        phase *= _single_phase(masks[hs], h, p)
        masks[hs] = masks[hs] & ~(1 << h) | 1 << p
    return Determinant(masks[0], masks[1], det.norb), phase


def _channel_singles(det: Determinant, spin: int):
    occ = det.occupied(spin)
    virt = det.virtual(spin)
    for h in occ:
        for p in virt:
            yield h, p


def enumerate_connected(
    det: Determinant,
) -> Iterator[tuple[Determinant, ExcitationInfo]]:
    """Every distinct single and double excitation of ``det``, once each.

    Order: alpha singles, beta singles, alpha-alpha doubles, beta-beta
    doubles, alpha-beta doubles; within a group, ascending orbital tuples.
    The order is deterministic, which downstream reductions rely on.
    """
    for spin in (ALPHA, BETA):
        for h, p in _channel_singles(det, spin):
            new, phase = apply_excitation(det, [(spin, h)], [(spin, p)])
            yield new, ExcitationInfo(1, ((spin, h),), ((spin, p),), phase)
    for spin in (ALPHA, BETA):
        occ = det.occupied(spin)
        virt = det.virtual(spin)
        for h1, h2 in combinations(occ, 2):
            for p1, p2 in combinations(virt, 2):
                holes = ((spin, h1), (spin, h2))
                parts = ((spin, p1), (spin, p2))
                new, phase = apply_excitation(det, holes, parts)
                yield new, ExcitationInfo(2, holes, parts, phase)
    for ha, pa in _channel_singles(det, ALPHA):
        for hb, pb in _channel_singles(det, BETA):
            holes = ((ALPHA, ha), (BETA, hb))
            parts = ((ALPHA, pa), (BETA, pb))
            new, phase = apply_excitation(det, holes, parts)
            yield new, ExcitationInfo(2, holes, parts, phase)
