"""Backend-agnostic kernel tests: the compiled and numpy implementations
must agree with each other and with numpy.linalg ground truth."""

import numpy as np
import pytest

from oqeig import _kernels_py
from oqeig.errors import ExactlySingular, NotPositiveDefinite

try:
    from oqeig import _kernels_cy

    BACKENDS = [_kernels_py, _kernels_cy]
    IDS = ["python", "cython"]
except ImportError:
    BACKENDS = [_kernels_py]
    IDS = ["python"]

from conftest import random_hermitian


@pytest.fixture(params=BACKENDS, ids=IDS)
def kern(request):
    return request.param


class TestJacobiEigh:
    def test_against_numpy_eigh(self, kern, rng):
        for n in (2, 5, 17):
            a = random_hermitian(rng, n)
            w, v = kern.jacobi_eigh(a)
            np.testing.assert_allclose(w, np.linalg.eigvalsh(a),
                                       rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(a @ v, v * w, atol=1e-12 * n)

    def test_eigenvectors_unitary(self, kern, rng):
        a = random_hermitian(rng, 12)
        _, v = kern.jacobi_eigh(a)
        np.testing.assert_allclose(v.conj().T @ v, np.eye(12), atol=1e-13)

    def test_real_symmetric(self, kern, rng):
        a = rng.standard_normal((8, 8))
        a = a + a.T
        w, v = kern.jacobi_eigh(a)
        assert np.all(np.diff(w) >= 0)
        np.testing.assert_allclose(a @ v, v * w, atol=1e-12)

    def test_diagonal_and_edge_cases(self, kern):
        w, v = kern.jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(w, [1.0, 2.0, 3.0])
        w, v = kern.jacobi_eigh(np.zeros((4, 4)))
        np.testing.assert_allclose(w, np.zeros(4))
        w, v = kern.jacobi_eigh(np.array([[5.0]]))
        np.testing.assert_allclose(w, [5.0])

    def test_backends_agree(self, rng):
        if len(BACKENDS) < 2:
            pytest.skip("compiled backend not built")
        a = random_hermitian(rng, 10)
        w_py, _ = _kernels_py.jacobi_eigh(a)
        w_cy, _ = _kernels_cy.jacobi_eigh(a)
        np.testing.assert_allclose(w_py, w_cy, rtol=1e-13, atol=1e-13)


class TestCholesky:
    def test_reconstruction(self, kern, rng):
        for n in (1, 4, 20):
            a = random_hermitian(rng, n)
            a = a @ a.conj().T + n * np.eye(n)
            low = kern.cholesky(a)
            np.testing.assert_allclose(low @ low.conj().T, a,
                                       atol=1e-10 * np.abs(a).max())
            assert np.allclose(np.triu(low, 1), 0)

    def test_identity(self, kern):
        np.testing.assert_allclose(kern.cholesky(np.eye(3)), np.eye(3))

    def test_hand_checked_factor(self, kern):
        low = kern.cholesky(np.array([[4.0, 2.0], [2.0, 2.0]]))
        np.testing.assert_allclose(low, [[2.0, 0.0], [1.0, 1.0]], atol=1e-14)

    def test_indefinite_rejected(self, kern):
        with pytest.raises(NotPositiveDefinite):
            kern.cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_semidefinite_rejected(self, kern):
        a = np.ones((3, 3))
        with pytest.raises(NotPositiveDefinite):
            kern.cholesky(a)


class TestLU:
    def test_factorization(self, kern, rng):
        n = 15
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        lu, piv = kern.lu_factor(a)
        low = np.tril(lu, -1) + np.eye(n)
        up = np.triu(lu)
        pa = a.copy()
        for j, p in enumerate(piv):
            if p != j:
                pa[[j, p]] = pa[[p, j]]
        np.testing.assert_allclose(low @ up, pa, atol=1e-12 * np.abs(a).max())

    def test_singular_raises(self, kern):
        with pytest.raises(ExactlySingular):
            kern.lu_factor(np.zeros((3, 3)))

    def test_backends_agree(self, rng):
        if len(BACKENDS) < 2:
            pytest.skip("compiled backend not built")
        a = rng.standard_normal((9, 9))
        lu_py, piv_py = _kernels_py.lu_factor(a)
        lu_cy, piv_cy = _kernels_cy.lu_factor(a)
        np.testing.assert_array_equal(piv_py, piv_cy)
        np.testing.assert_allclose(lu_py, lu_cy, rtol=1e-13, atol=1e-14)


class TestSolveTriangular:
    def test_lower_vector(self, kern, rng):
        n = 10
        low = np.tril(rng.standard_normal((n, n))) + 3 * np.eye(n)
        b = rng.standard_normal(n)
        x = kern.solve_triangular(low, b, lower=True)
        np.testing.assert_allclose(low @ x, b, atol=1e-12)

    def test_upper_matrix_rhs(self, kern, rng):
        n = 8
        up = np.triu(rng.standard_normal((n, n))) + 3 * np.eye(n)
        b = rng.standard_normal((n, 4)) + 1j * rng.standard_normal((n, 4))
        x = kern.solve_triangular(up, b, lower=False)
        np.testing.assert_allclose(up @ x, b, atol=1e-12)

    def test_unit_diagonal(self, kern, rng):
        n = 6
        low = np.tril(rng.standard_normal((n, n)), -1) + np.eye(n)
        diag_scrambled = low + np.diag(rng.standard_normal(n) + 5)
        np.fill_diagonal(diag_scrambled, 99.0)  # must be ignored
        b = rng.standard_normal(n)
        x = kern.solve_triangular(diag_scrambled, b, lower=True,
                                  unit_diagonal=True)
        np.testing.assert_allclose(low @ x, b, atol=1e-12)
