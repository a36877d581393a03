import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from damlink.errors import RankDeficient
from damlink.numerics import dft, hermitian, lsq_solve, numerical_rank, projection_orthogonal
from oracles import dft_matrix, projection_via_inverse


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


seeds = st.integers(0, 2**32 - 1)


class TestLsqSolve:
    def test_identity(self):
        b = crandn(np.random.default_rng(0), 3, 2)
        np.testing.assert_allclose(lsq_solve(np.eye(3), b), b, atol=1e-14)

    def test_mean_of_two_points(self):
        x = lsq_solve(np.array([[1.0], [1.0]]), np.array([[0.0], [2.0]]))
        np.testing.assert_allclose(x, [[1.0]], atol=1e-14)

    def test_recovers_known_solution(self):
        rng = np.random.default_rng(1)
        a = crandn(rng, 8, 3)
        x0 = crandn(rng, 3, 4)
        x = lsq_solve(a, a @ x0)
        assert np.linalg.norm(x - x0) <= 1e-10 * np.linalg.norm(x0)

    def test_vector_rhs(self):
        rng = np.random.default_rng(2)
        a = crandn(rng, 6, 2)
        x0 = crandn(rng, 2)
        x = lsq_solve(a, a @ x0)
        assert x.shape == (2,)
        np.testing.assert_allclose(x, x0, rtol=1e-10)

    def test_matches_numpy_lstsq(self):
        rng = np.random.default_rng(3)
        a, b = crandn(rng, 10, 4), crandn(rng, 10, 3)
        ref = np.linalg.lstsq(a, b, rcond=None)[0]
        np.testing.assert_allclose(lsq_solve(a, b), ref, rtol=1e-10, atol=1e-12)

    def test_rank_deficient(self):
        a = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
        with pytest.raises(RankDeficient):
            lsq_solve(a, np.ones(3))

    def test_too_many_columns(self):
        with pytest.raises(RankDeficient):
            lsq_solve(np.ones((2, 3)), np.ones(2))

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, m=st.integers(1, 12), data=st.data())
    def test_residual_orthogonal(self, seed, m, data):
        k = data.draw(st.integers(1, m))
        rng = np.random.default_rng(seed)
        a, b = crandn(rng, m, k), crandn(rng, m, 2)
        x = lsq_solve(a, b)
        g = a.conj().T @ (b - a @ x)
        assert np.max(np.abs(g)) < 1e-9 * np.linalg.norm(a) * np.linalg.norm(b)


class TestProjection:
    def test_axis(self):
        q = projection_orthogonal(np.array([[1.0], [0.0], [0.0]]))
        np.testing.assert_allclose(q, np.diag([0.0, 1.0, 1.0]), atol=1e-15)

    def test_empty(self):
        np.testing.assert_array_equal(projection_orthogonal(np.zeros((4, 0)), dim=4), np.eye(4))

    def test_random_16x3(self):
        rng = np.random.default_rng(4)
        h = crandn(rng, 16, 3)
        q = projection_orthogonal(h)
        assert np.linalg.norm(q @ h) < 1e-10 * np.linalg.norm(h)
        np.testing.assert_allclose(q @ q, q, atol=1e-10)
        np.testing.assert_allclose(q, q.conj().T, atol=1e-12)
        np.testing.assert_allclose(q, projection_via_inverse(h), atol=1e-10)

    def test_rank_deficient(self):
        v = crandn(np.random.default_rng(5), 5)
        with pytest.raises(RankDeficient):
            projection_orthogonal(np.column_stack([v, 2j * v]))

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, m=st.integers(2, 16), data=st.data())
    def test_properties(self, seed, m, data):
        k = data.draw(st.integers(1, m - 1))
        h = crandn(np.random.default_rng(seed), m, k)
        q = projection_orthogonal(h)
        np.testing.assert_allclose(q, q.conj().T, atol=1e-12)
        np.testing.assert_allclose(q @ q, q, atol=1e-10)
        assert np.linalg.norm(q @ h) < 1e-10 * np.linalg.norm(h)
        # rank of the complement
        assert round(np.trace(q).real) == m - k


class TestDft:
    def test_impulse(self):
        np.testing.assert_allclose(dft(np.array([1, 0, 0, 0])), 0.5 * np.ones(4), atol=1e-15)

    def test_round_trip(self):
        x = crandn(np.random.default_rng(6), 64)
        np.testing.assert_allclose(dft(dft(x), inverse=True), x, atol=1e-10)

    def test_single_tone(self):
        n = np.arange(8)
        X = dft(np.exp(2j * np.pi * 3 * n / 8))
        expected = np.zeros(8, complex)
        expected[3] = np.sqrt(8)
        np.testing.assert_allclose(X, expected, atol=1e-12)

    def test_matches_explicit_matrix(self):
        x = crandn(np.random.default_rng(7), 12)
        F = dft_matrix(12)
        np.testing.assert_allclose(dft(x), F @ x, atol=1e-12)
        np.testing.assert_allclose(dft(x, inverse=True), F.conj().T @ x, atol=1e-12)

    def test_axis(self):
        x = crandn(np.random.default_rng(8), 3, 5)
        np.testing.assert_allclose(dft(x, axis=0), dft_matrix(3) @ x, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds, K=st.integers(1, 128))
    def test_unitary(self, seed, K):
        x = crandn(np.random.default_rng(seed), K)
        assert abs(np.linalg.norm(dft(x)) - np.linalg.norm(x)) <= 1e-10 * np.linalg.norm(x)


def test_hermitian_and_rank():
    a = np.array([[1 + 1j, 2], [0, 3j]])
    np.testing.assert_array_equal(hermitian(a), a.conj().T)
    assert numerical_rank(np.outer([1, 2, 3], [1, 1])) == 1
    assert numerical_rank(np.eye(4)) == 4
