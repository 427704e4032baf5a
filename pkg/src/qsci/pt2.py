"""Second-order Epstein-Nesbet correction and zero-correction extrapolation.

The external space is the set of determinants connected to the subspace
by single or double excitations, found as a hash-set difference.
Couplings are accumulated across ALL parents before squaring (per-parent
squares would double-count shared externals).  Accumulation runs over
fixed-size parent blocks merged in block order, so the floating-point
reduction is identical for any worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .determinants import Determinant, enumerate_connected
from .integrals import IntegralStore
from .parallel import fixed_blocks, parallel_map
from .slater_condon import diagonal_element, element_from_info

PARENT_BLOCK = 128
INTRUDER_THRESHOLD = 1e-8


@dataclass
class Pt2Result:
    correction: float  # <= 0 when all denominators are positive
    n_external: int
    intruders: int
    contributions: dict[Determinant, float] | None = None


@dataclass
class ExtrapolationResult:
    intercept: float  # estimated exact energy at zero correction
    slope: float
    r_squared: float
    n_points: int


def _block_amplitudes(args) -> dict[Determinant, float]:
    dets, coeffs, store, in_set = args
    amp: dict[Determinant, float] = {}
    for parent, vk in zip(dets, coeffs):
        if vk == 0.0:
            continue
        for cand, info in enumerate_connected(parent):
            if cand in in_set:
                continue
            value = element_from_info(parent, info, store)
            if value != 0.0:
                amp[cand] = amp.get(cand, 0.0) + vk * value
    return amp


def epstein_nesbet_pt2(
    state, store: IntegralStore, *, keep_contributions: bool = False
) -> Pt2Result:
    """Correction -sum |<ext|H|Psi>|^2 / (<ext|H|ext> - E) over externals.

    ``state`` needs ``dets``, ``energy``, and ``vector`` attributes (a
    sampling state or a baseline result).  Near-singular denominators
    (|denom| < 1e-8) are skipped and tallied, never divided.
    """
    dets = tuple(state.dets)
    vector = np.asarray(state.vector)
    energy = float(state.energy)
    in_set = frozenset(dets)

    tasks = [
        (tuple(dets[k] for k in block), vector[list(block)], store, in_set)
        for block in fixed_blocks(len(dets), PARENT_BLOCK)
    ]
    amplitude: dict[Determinant, float] = {}
    for partial in parallel_map(_block_amplitudes, tasks):
        for det, amp in partial.items():
            amplitude[det] = amplitude.get(det, 0.0) + amp

    correction = 0.0
    intruders = 0
    contributions: dict[Determinant, float] | None = {} if keep_contributions else None
    for det in sorted(amplitude, key=Determinant.key):
        denom = diagonal_element(det, store) - energy
        if abs(denom) < INTRUDER_THRESHOLD:
            intruders += 1
            continue
        term = -(amplitude[det] ** 2) / denom
        correction += term
        if contributions is not None:
            contributions[det] = term
    return Pt2Result(correction, len(amplitude), intruders, contributions)


def extrapolate_pt2(points) -> ExtrapolationResult:
    """Unweighted OLS of variational energy against the PT2 correction.

    The intercept is the zero-correction estimate of the exact energy.
    Regression is on total energies; shifting both axes by constants
    (e.g. to correlation energies) moves neither the fit quality nor the
    physical content of the intercept.
    """
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise ValueError("need at least two (correction, energy) points")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    x_c = x - x.mean()
    denom = float(x_c @ x_c)
    if denom == 0.0:
        raise ValueError("singular fit: all correction values identical")
    slope = float(x_c @ (y - y.mean())) / denom
    intercept = float(y.mean() - slope * x.mean())
    residuals = y - (intercept + slope * x)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - float((residuals**2).sum()) / ss_tot
    return ExtrapolationResult(intercept, slope, max(0.0, min(1.0, r_squared)), len(pts))
