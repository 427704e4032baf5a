import numpy as np
import pytest
import scipy.sparse as sp

from qsci.eigensolver import EigenResult, davidson_lowest
from qsci.errors import ConvergenceError, DimensionError


def random_sparse_symmetric(n, density, seed):
    rng = np.random.default_rng(seed)
    mat = sp.random(n, n, density=density, random_state=rng, format="csr")
    mat = mat + mat.T
    mat.setdiag(rng.normal(size=n) * 2.0)
    return mat.tocsr()


class TestBasics:
    def test_one_by_one(self):
        result = davidson_lowest(np.array([[3.25]]))
        assert result.energy == 3.25
        np.testing.assert_allclose(np.abs(result.vector), [1.0])

    def test_diagonal_matrix(self):
        result = davidson_lowest(np.diag([3.0, 1.0, 2.0]))
        assert result.energy == 1.0
        np.testing.assert_allclose(np.abs(result.vector), [0, 1, 0], atol=1e-12)

    def test_zero_dimension_raises(self):
        with pytest.raises(DimensionError):
            davidson_lowest(np.zeros((0, 0)))

    def test_wrong_v0_length_raises(self):
        with pytest.raises(DimensionError):
            davidson_lowest(np.eye(3), v0=np.ones(2))

    def test_random_200_matches_dense(self):
        mat = random_sparse_symmetric(200, 0.05, seed=2)
        exact = np.linalg.eigvalsh(mat.toarray())[0]
        result = davidson_lowest(mat, tol=1e-11)
        assert abs(result.energy - exact) < 1e-10
        assert result.residual_norm <= 1e-11

    def test_eigen_residual_invariant(self):
        mat = random_sparse_symmetric(150, 0.08, seed=9)
        result = davidson_lowest(mat, tol=1e-10)
        assert abs(np.linalg.norm(result.vector) - 1.0) < 1e-12
        residual = np.linalg.norm(mat @ result.vector - result.energy * result.vector)
        assert residual <= 1e-10


class TestWarmStart:
    def test_energy_independent_of_start(self):
        mat = random_sparse_symmetric(120, 0.1, seed=4)
        tol = 1e-10
        baseline = davidson_lowest(mat, tol=tol).energy
        rng = np.random.default_rng(0)
        for _ in range(4):
            v0 = rng.normal(size=120)
            result = davidson_lowest(mat, v0=v0, tol=tol)
            assert abs(result.energy - baseline) <= 10 * tol

    def test_zero_padded_start_accepted(self):
        mat = random_sparse_symmetric(100, 0.1, seed=6)
        v0 = np.zeros(100)
        v0[:3] = [0.9, 0.1, 0.4]
        result = davidson_lowest(mat, v0=v0, tol=1e-10)
        exact = np.linalg.eigvalsh(mat.toarray())[0]
        assert abs(result.energy - exact) < 1e-9

    def test_deterministic(self):
        mat = random_sparse_symmetric(90, 0.1, seed=13)
        a = davidson_lowest(mat, tol=1e-10)
        b = davidson_lowest(mat, tol=1e-10)
        assert a.energy == b.energy
        assert np.array_equal(a.vector, b.vector)
        assert a.iterations == b.iterations


class TestRitzMonotonicity:
    def test_ritz_values_non_increasing(self):
        mat = random_sparse_symmetric(200, 0.05, seed=21)
        result = davidson_lowest(mat, tol=1e-10)
        ritz = result.ritz_values
        assert len(ritz) >= 2
        for prev, cur in zip(ritz, ritz[1:]):
            assert cur <= prev + 1e-12


class TestFailure:
    def test_non_convergence_carries_best_iterate(self):
        mat = random_sparse_symmetric(200, 0.05, seed=3)
        with pytest.raises(ConvergenceError) as err:
            davidson_lowest(mat, tol=1e-14, max_iter=2)
        best = err.value.best
        assert isinstance(best, EigenResult)
        assert np.isfinite(best.energy)
        assert best.residual_norm > 0
