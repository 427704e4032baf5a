"""Lowest-eigenpair Davidson solver with warm starting.

Diagonal (Jacobi) preconditioner, restart at subspace size 20, dense
``numpy.linalg.eigh`` fallback below 65 rows.  Deterministic: identical
(matrix, v0, tol) always produce the same iterate sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConvergenceError, DimensionError

DENSE_MAX = 64
MAX_SUBSPACE = 20
DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 500


@dataclass
class EigenResult:
    energy: float
    vector: np.ndarray
    iterations: int
    residual_norm: float
    # Ritz estimates per iteration; non-increasing by construction.
    ritz_values: list[float] = field(default_factory=list)


def _as_operator(matrix):
    if hasattr(matrix, "matrix"):  # InteractionMatrix
        matrix = matrix.matrix
    if sp.issparse(matrix):
        return matrix
    return np.asarray(matrix, dtype=float)


def _fix_sign(vec: np.ndarray) -> np.ndarray:
    pivot = int(np.argmax(np.abs(vec)))
    return -vec if vec[pivot] < 0 else vec


def _dense_lowest(mat, tol) -> EigenResult:
    dense = mat.toarray() if sp.issparse(mat) else mat
    vals, vecs = np.linalg.eigh(dense)
    vec = _fix_sign(vecs[:, 0].copy())
    energy = float(vals[0])
    residual = float(np.linalg.norm(dense @ vec - energy * vec))
    return EigenResult(energy, vec, 1, residual, [energy])


def davidson_lowest(
    matrix,
    v0: np.ndarray | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EigenResult:
    """Algebraically smallest eigenpair of a symmetric matrix.

    ``v0`` warm-starts the search (zero padding allowed); any vector with
    nonzero ground-state overlap converges to the same energy.  Raises
    :class:`ConvergenceError` carrying the best iterate on stagnation.
    """
    mat = _as_operator(matrix)
    k_dim = mat.shape[0]
    if k_dim == 0:
        raise DimensionError("cannot diagonalize a dimension-0 matrix")
    if v0 is not None and len(v0) != k_dim:
        raise DimensionError(f"v0 has length {len(v0)}, expected {k_dim}")
    if k_dim <= DENSE_MAX:
        return _dense_lowest(mat, tol)

    diag = mat.diagonal()
    if v0 is not None and np.linalg.norm(v0) > 1e-12:
        start = np.asarray(v0, dtype=float) / np.linalg.norm(v0)
    else:
        start = np.zeros(k_dim)
        start[int(np.argmin(diag))] = 1.0

    basis = [start]
    images = [mat @ start]
    ritz_history: list[float] = []
    theta = float(start @ images[0])
    x = start
    residual_norm = np.inf

    for iteration in range(1, max_iter + 1):
        dim = len(basis)
        v_mat = np.column_stack(basis)
        w_mat = np.column_stack(images)
        proj = v_mat.T @ w_mat
        proj = 0.5 * (proj + proj.T)
        vals, vecs = np.linalg.eigh(proj)
        theta = float(vals[0])
        s = vecs[:, 0]
        x = v_mat @ s
        if x[int(np.argmax(np.abs(x)))] < 0:  # deterministic overall sign
            x = -x
            s = -s
        residual = w_mat @ s - theta * x
        residual_norm = float(np.linalg.norm(residual))
        ritz_history.append(theta)
        if residual_norm <= tol:
            return EigenResult(theta, x, iteration, residual_norm, ritz_history)

        if dim >= min(MAX_SUBSPACE, k_dim):
            basis = [x]
            images = [mat @ x]
            continue

        denom = diag - theta
        denom = np.where(np.abs(denom) < 1e-8, np.copysign(1e-8, denom), denom)
        t = residual / denom
        for _ in range(2):
            for b in basis:
                t = t - (b @ t) * b
        norm_t = np.linalg.norm(t)
        if norm_t < 1e-12:
            # Deterministic fallback: inject the axis with the largest
            # residual component not already represented.
            for j in np.argsort(-np.abs(residual)):
                t = np.zeros(k_dim)
                t[j] = 1.0
                for _ in range(2):
                    for b in basis:
                        t = t - (b @ t) * b
                norm_t = np.linalg.norm(t)
                if norm_t >= 1e-8:
                    break
            else:
                break
        t /= norm_t
        basis.append(t)
        images.append(mat @ t)

    best = EigenResult(theta, x, max_iter, residual_norm, ritz_history)
    raise ConvergenceError(
        f"Davidson did not reach tolerance {tol} in {max_iter} iterations "
        f"(best residual {residual_norm:.3e})",
        best=best,
    )
