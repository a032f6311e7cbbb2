import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oimsim.errors import DimensionError, NotHermitian, RankDeficient
from oimsim.linalg import (
    OrthonormalBasis,
    null_space_basis,
    project_onto,
    pseudo_inverse,
    random_orthonormal,
    smallest_eigpair,
)
from oimsim.rng import RandomStream

from conftest import crandn


def maxabs(x):
    return np.max(np.abs(x))


class TestPseudoInverse:
    def test_identity(self):
        np.testing.assert_allclose(pseudo_inverse(np.eye(2)), np.eye(2), atol=1e-15)

    def test_scaled_identity(self):
        np.testing.assert_allclose(pseudo_inverse(2 * np.eye(2)), 0.5 * np.eye(2), atol=1e-15)

    def test_tall_matches_normal_equations(self):
        gen = np.random.default_rng(3)
        A = crandn(gen, 4, 2)
        P = pseudo_inverse(A)
        assert P.shape == (2, 4)
        assert maxabs(P @ A - np.eye(2)) <= 1e-9
        oracle = np.linalg.solve(A.conj().T @ A, A.conj().T)
        assert maxabs(P - oracle) <= 1e-9

    def test_rank_deficient(self):
        A = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]])
        with pytest.raises(RankDeficient):
            pseudo_inverse(A)

    def test_wide_rejected(self):
        with pytest.raises(DimensionError):
            pseudo_inverse(np.ones((2, 3)))

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            pseudo_inverse(np.array([[np.nan], [1.0]]))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), rows=st.integers(1, 8), extra=st.integers(0, 4))
    def test_left_inverse_property(self, seed, rows, extra):
        gen = np.random.default_rng(seed)
        cols = rows
        A = crandn(gen, rows + extra, cols)
        assert maxabs(pseudo_inverse(A) @ A - np.eye(cols)) <= 1e-9


class TestRandomOrthonormal:
    def test_scalar_is_unit_modulus(self, rng):
        B = random_orthonormal(1, 1, rng)
        assert B.columns.shape == (1, 1)
        assert abs(abs(B.columns[0, 0]) - 1) <= 1e-12

    def test_gram_identity(self, rng):
        B = random_orthonormal(4, 3, rng)
        assert B.columns.shape == (4, 3)
        assert maxabs(B.columns.conj().T @ B.columns - np.eye(3)) <= 1e-10

    def test_isotropy_first_coordinate(self):
        root = RandomStream(11)
        vals = [abs(random_orthonormal(4, 1, root.substream(t)).columns[0, 0]) ** 2
                for t in range(10_000)]
        assert abs(np.mean(vals) - 0.25) <= 0.02

    def test_invalid_dims(self, rng):
        with pytest.raises(DimensionError):
            random_orthonormal(2, 3, rng)
        with pytest.raises(DimensionError):
            random_orthonormal(2, 0, rng)

    def test_deterministic(self):
        a = random_orthonormal(5, 2, RandomStream(7)).columns
        b = random_orthonormal(5, 2, RandomStream(7)).columns
        assert np.array_equal(a, b)


class TestNullSpace:
    def test_standard_basis(self):
        U = null_space_basis(OrthonormalBasis(np.array([[1.0], [0.0]])))
        assert U.basis_dim == 1
        assert abs(abs(U.columns[1, 0]) - 1) <= 1e-12
        assert abs(U.columns[0, 0]) <= 1e-12

    def test_codim_one(self, rng):
        V = random_orthonormal(4, 3, rng)
        U = null_space_basis(V)
        assert U.basis_dim == 1
        assert maxabs(V.columns.conj().T @ U.columns) <= 1e-10

    def test_concatenation_unitary(self, rng):
        V = random_orthonormal(6, 2, rng)
        U = null_space_basis(V)
        assert U.basis_dim == 4
        Q = np.concatenate([V.columns, U.columns], axis=1)
        assert maxabs(Q.conj().T @ Q - np.eye(6)) <= 1e-9
        assert maxabs(Q @ Q.conj().T - np.eye(6)) <= 1e-9

    def test_full_basis_rejected(self, rng):
        with pytest.raises(DimensionError):
            null_space_basis(random_orthonormal(3, 3, rng))

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 9), data=st.data())
    def test_unitary_property(self, seed, d, data):
        r = data.draw(st.integers(1, d - 1))
        V = random_orthonormal(d, r, RandomStream(seed))
        Q = np.concatenate([V.columns, null_space_basis(V).columns], axis=1)
        assert maxabs(Q.conj().T @ Q - np.eye(d)) <= 1e-9


class TestProjection:
    def test_fixed_point(self, rng):
        U = random_orthonormal(4, 2, rng)
        h = U.columns @ np.array([0.3 - 1j, 2.0])
        assert np.linalg.norm(project_onto(U, h) - h) <= 1e-10

    def test_kernel_maps_to_zero(self, rng):
        V = random_orthonormal(4, 2, rng)
        U = null_space_basis(V)
        h = V.columns @ np.array([1.0 + 1j, -0.5])
        assert np.linalg.norm(project_onto(U, h)) <= 1e-10

    def test_pythagoras(self, rng):
        U = random_orthonormal(4, 2, rng)
        h = rng.complex_normal(4)
        p = project_onto(U, h)
        lhs = np.linalg.norm(p) ** 2 + np.linalg.norm(h - p) ** 2
        assert abs(lhs - np.linalg.norm(h) ** 2) <= 1e-9

    def test_length_mismatch(self, rng):
        with pytest.raises(DimensionError):
            project_onto(random_orthonormal(4, 2, rng), np.ones(3))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 8), data=st.data())
    def test_idempotent_and_contractive(self, seed, d, data):
        r = data.draw(st.integers(1, d))
        s = RandomStream(seed)
        U = random_orthonormal(d, r, s)
        h = s.complex_normal(d)
        p = project_onto(U, h)
        assert np.linalg.norm(project_onto(U, p) - p) <= 1e-10
        assert np.linalg.norm(p) <= np.linalg.norm(h) + 1e-12


class TestSmallestEigpair:
    def test_diagonal(self):
        lam, w = smallest_eigpair(np.diag([3.0, 1.0, 2.0]))
        assert lam == pytest.approx(1.0, abs=1e-12)
        assert abs(abs(w[1]) - 1) <= 1e-12

    def test_identity_any_unit_vector(self):
        lam, w = smallest_eigpair(np.eye(3))
        assert lam == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.norm(w) == pytest.approx(1.0, abs=1e-12)

    def test_2x2_closed_form(self):
        gen = np.random.default_rng(5)
        B = crandn(gen, 2, 2)
        A = B.conj().T @ B
        a, d, b = A[0, 0].real, A[1, 1].real, A[0, 1]
        closed = (a + d) / 2 - np.sqrt(((a - d) / 2) ** 2 + abs(b) ** 2)
        lam, w = smallest_eigpair(A)
        assert abs(lam - closed) <= 1e-10
        assert np.linalg.norm(A @ w - lam * w) <= 1e-8 * maxabs(A) * 2

    def test_not_hermitian(self):
        with pytest.raises(NotHermitian):
            smallest_eigpair(np.array([[1.0, 1.0], [0.0, 1.0]]))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 8))
    def test_residual_and_minimality(self, seed, d):
        gen = np.random.default_rng(seed)
        B = crandn(gen, d + 1, d)
        A = B.conj().T @ B
        A = (A + A.conj().T) / 2
        lam, w = smallest_eigpair(A)
        assert np.linalg.norm(A @ w - lam * w) <= 1e-8 * maxabs(A) * d
        assert lam <= np.min(np.linalg.eigvalsh(A)) + 1e-10
        assert lam >= 0
