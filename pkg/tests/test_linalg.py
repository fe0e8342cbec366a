import numpy as np
import pytest

from resbvp.linalg import (
    cokernel_projector,
    kernel_projector,
    numerical_rank,
    pseudoinverse,
)


def random_matrix_with_rank(rng, rows, cols, rank):
    """Rank-controlled random matrix with singular values in [0.5, 2]."""
    U, _ = np.linalg.qr(rng.standard_normal((rows, rows)))
    V, _ = np.linalg.qr(rng.standard_normal((cols, cols)))
    s = np.zeros((rows, cols))
    vals = rng.uniform(0.5, 2.0, size=rank)
    s[:rank, :rank] = np.diag(vals)
    return U @ s @ V.T


class TestNumericalRank:
    def test_identity(self):
        rd = numerical_rank(np.eye(3), tol=1e-12)
        assert rd.rank == 3

    def test_zero_matrix(self):
        rd = numerical_rank(np.zeros((2, 4)))
        assert rd.rank == 0

    def test_tolerance_cutoff(self):
        rd = numerical_rank(np.diag([5.0, 1e-14]), tol=1e-10)
        assert rd.rank == 1
        assert np.all(np.diff(rd.singular_values) <= 0)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            numerical_rank(np.array([[1.0, np.nan]]))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            numerical_rank(np.zeros((0, 3)))


class TestPseudoinverse:
    def test_identity(self):
        assert np.allclose(pseudoinverse(np.eye(3)), np.eye(3))

    def test_zero(self):
        assert np.array_equal(pseudoinverse(np.zeros((2, 3))), np.zeros((3, 2)))

    def test_diagonal(self):
        assert np.allclose(pseudoinverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))

    def test_least_squares_against_normal_equations(self):
        # independent oracle: solve (M^T M) x = M^T b by dense elimination
        rng = np.random.default_rng(7)
        M = rng.standard_normal((5, 3))
        b = rng.standard_normal(5)
        x_oracle = np.linalg.solve(M.T @ M, M.T @ b)
        assert np.allclose(pseudoinverse(M) @ b, x_oracle, atol=1e-10)


class TestProjectors:
    def test_invertible_has_trivial_kernel(self):
        M = np.array([[2.0, 1.0], [0.0, 3.0]])
        assert np.allclose(kernel_projector(M), 0.0, atol=1e-12)
        assert np.allclose(cokernel_projector(M), 0.0, atol=1e-12)

    def test_zero_matrix_full_kernel(self):
        assert np.allclose(kernel_projector(np.zeros((3, 3))), np.eye(3))
        assert np.allclose(cokernel_projector(np.zeros((2, 2))), np.eye(2))

    def test_row_vector_kernel(self):
        # N([1, 1]) = span{(1, -1)}/sqrt(2)
        P = kernel_projector(np.array([[1.0, 1.0]]))
        assert np.allclose(P, [[0.5, -0.5], [-0.5, 0.5]])

    def test_column_vector_cokernel(self):
        P = cokernel_projector(np.array([[1.0], [1.0]]))
        assert np.allclose(P, [[0.5, -0.5], [-0.5, 0.5]])


class TestPenroseProperties:
    @pytest.mark.parametrize("seed", range(12))
    def test_penrose_and_projector_laws(self, seed):
        rng = np.random.default_rng(seed)
        rows, cols = rng.integers(1, 51, size=2)
        for rank in sorted({min(rows, cols), 1, min(rows, cols) // 2} - {0}):
            M = random_matrix_with_rank(rng, rows, cols, rank)
            rd = numerical_rank(M)
            assert rd.rank == rank
            P = pseudoinverse(M, rd)
            assert np.linalg.norm(M @ P @ M - M) <= 1e-10 * (1 + np.linalg.norm(M))
            assert np.linalg.norm(P @ M @ P - P) <= 1e-10 * (1 + np.linalg.norm(P))
            assert np.linalg.norm((M @ P).T - M @ P) <= 1e-10
            assert np.linalg.norm((P @ M).T - P @ M) <= 1e-10
            for proj, expected_rank in (
                (kernel_projector(M, rd), cols - rank),
                (cokernel_projector(M, rd), rows - rank),
            ):
                assert np.linalg.norm(proj @ proj - proj) <= 1e-10
                assert np.linalg.norm(proj.T - proj) <= 1e-10
                assert round(np.trace(proj)) == expected_rank
            assert np.allclose(M @ kernel_projector(M, rd), 0.0, atol=1e-10)
            assert np.allclose(cokernel_projector(M, rd) @ M, 0.0, atol=1e-10)

    def test_exactly_solvable_consistency(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            M = random_matrix_with_rank(rng, 6, 4, 2)
            b = M @ rng.standard_normal(4)
            defect = np.linalg.norm((np.eye(6) - M @ pseudoinverse(M)) @ b)
            assert defect <= 1e-8 * (1 + np.linalg.norm(b))
