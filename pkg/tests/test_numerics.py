import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swift_sim import (
    complex_gaussian,
    kron,
    poisson_sample,
    rng_fork,
    unvec,
    vec,
    weighted_sample_without_replacement,
)


class TestRngFork:
    def test_same_ids_same_stream(self):
        a = rng_fork(7, 0).standard_normal(64)
        b = rng_fork(7, 0).standard_normal(64)
        np.testing.assert_array_equal(a, b)

    def test_distinct_ids_differ(self):
        a = rng_fork(7, 0).standard_normal(64)
        b = rng_fork(7, 1).standard_normal(64)
        assert np.any(a != b)

    def test_nested_ids(self):
        a = rng_fork(7, 1, 2, 3).standard_normal(8)
        b = rng_fork(7, 1, 2, 4).standard_normal(8)
        assert np.any(a != b)

    def test_negative_seed_rejected(self):
        with pytest.raises(ValueError):
            rng_fork(-1, 0)


class TestComplexGaussian:
    def test_zero_variance_is_mean(self):
        z = complex_gaussian(2.0 + 1.0j, 0.0, rng_fork(3, 0), size=10)
        np.testing.assert_array_equal(z, np.full(10, 2.0 + 1.0j))

    def test_moments(self):
        z = complex_gaussian(0.0, 1.0, rng_fork(3, 1), size=100_000)
        assert abs(z.mean()) < 0.02
        assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 0.05

    def test_per_component_variance(self):
        z = complex_gaussian(0.0, 4.0, rng_fork(3, 2), size=100_000)
        assert np.var(z.real) == pytest.approx(2.0, rel=0.05)
        assert np.var(z.imag) == pytest.approx(2.0, rel=0.05)

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            complex_gaussian(0.0, -1.0, rng_fork(3, 3))


class TestPoisson:
    def test_zero_rate(self):
        rng = rng_fork(4, 0)
        assert all(poisson_sample(0.0, rng) == 0 for _ in range(100))

    def test_pmf_at_three(self):
        rng = rng_fork(4, 1)
        draws = np.array([poisson_sample(3.0, rng) for _ in range(100_000)])
        p3 = np.mean(draws == 3)
        assert p3 == pytest.approx(27 * np.exp(-3) / 6, abs=0.01)
        assert draws.mean() == pytest.approx(3.0, abs=0.05)

    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError):
            poisson_sample(-0.5, rng_fork(4, 2))


class TestKronVec:
    def test_identity(self):
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_column_vectors(self):
        a = np.array([[1.0], [2.0]])
        b = np.array([[3.0], [4.0], [5.0]])
        np.testing.assert_array_equal(kron(a, b).ravel(), [3, 4, 5, 6, 8, 10])

    def test_vec_triple_product(self):
        rng = rng_fork(5, 0)
        A = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
        B = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        C = rng.standard_normal((2, 5)) + 1j * rng.standard_normal((2, 5))
        lhs = vec(A @ B @ C)
        rhs = kron(C.T, A) @ vec(B)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12

    @settings(max_examples=30, deadline=None)
    @given(
        r=st.integers(1, 16), m=st.integers(1, 16), n=st.integers(1, 16),
        c=st.integers(1, 16), seed=st.integers(0, 2**31 - 1),
    )
    def test_vec_triple_product_shapes(self, r, m, n, c, seed):
        rng = rng_fork(seed, 0)
        A = rng.standard_normal((r, m)) + 1j * rng.standard_normal((r, m))
        B = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        C = rng.standard_normal((n, c)) + 1j * rng.standard_normal((n, c))
        lhs = vec(A @ B @ C)
        rhs = kron(C.T, A) @ vec(B)
        scale = max(1.0, np.max(np.abs(lhs)))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


class TestVec:
    def test_column_major(self):
        M = np.array([["a", "c"], ["b", "d"]], dtype=object)
        assert list(vec(M)) == ["a", "b", "c", "d"]

    def test_index_map(self):
        # entry (row j=2, col i=3) of an 8-row matrix lands at 1-based index 18
        M = np.zeros((8, 4))
        M[1, 2] = 1.0  # 0-based
        assert vec(M)[17] == 1.0

    def test_round_trip(self):
        rng = rng_fork(5, 1)
        M = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
        np.testing.assert_array_equal(unvec(vec(M), 6, 3), M)

    @settings(max_examples=50, deadline=None)
    @given(rows=st.integers(1, 12), cols=st.integers(1, 12), seed=st.integers(0, 2**31 - 1))
    def test_round_trip_property(self, rows, cols, seed):
        M = rng_fork(seed, 1).standard_normal((rows, cols))
        np.testing.assert_array_equal(unvec(vec(M), rows, cols), M)

    def test_unvec_size_mismatch(self):
        with pytest.raises(ValueError):
            unvec(np.zeros(5), 2, 3)


class TestWeightedSampling:
    def test_single_support_point(self):
        rng = rng_fork(6, 0)
        for _ in range(50):
            assert weighted_sample_without_replacement([0.0, 1.0, 0.0], 1, rng)[0] == 1

    def test_uniform_pairs(self):
        rng = rng_fork(6, 1)
        counts = {}
        n = 100_000
        for _ in range(n):
            pair = frozenset(weighted_sample_without_replacement(np.ones(4), 2, rng))
            counts[pair] = counts.get(pair, 0) + 1
        assert len(counts) == 6
        for c in counts.values():
            assert c / n == pytest.approx(1 / 6, abs=0.01)

    def test_first_draw_marginal(self):
        rng = rng_fork(6, 2)
        hits = sum(
            weighted_sample_without_replacement([2.0, 1.0, 1.0], 1, rng)[0] == 0
            for _ in range(100_000)
        )
        assert hits / 100_000 == pytest.approx(0.5, abs=0.01)

    def test_too_few_positive_weights(self):
        with pytest.raises(ValueError):
            weighted_sample_without_replacement([1.0, 0.0, 0.0], 2, rng_fork(6, 3))

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            weighted_sample_without_replacement([1.0, -0.1], 1, rng_fork(6, 4))

    def test_non_finite_weight_rejected(self):
        with pytest.raises(ValueError):
            weighted_sample_without_replacement([1.0, np.inf], 1, rng_fork(6, 5))

    @settings(max_examples=50, deadline=None)
    @given(
        n=st.integers(1, 20), seed=st.integers(0, 2**31 - 1),
        data=st.data(),
    )
    def test_distinct_indices(self, n, seed, data):
        k = data.draw(st.integers(1, n))
        out = weighted_sample_without_replacement(np.ones(n), k, rng_fork(seed, 2))
        assert len(set(out.tolist())) == k
        assert all(0 <= i < n for i in out)
