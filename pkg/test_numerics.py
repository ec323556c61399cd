"""Tests for the random stream, covariance and the Jacobi eigensolver.

The 1,000-matrix eigensolver sweep is slow in pure Python; set
RUN_SLOW_TESTS=true to include it.
"""

import os

import numpy as np
import pytest

from defect_bench.errors import NumericsError
from defect_bench.numerics.linalg import _off_diagonal_norm, covariance, eigh_symmetric
from defect_bench.numerics.random import RandomSource, derive_seed, rng_stream

RUN_SLOW_TESTS = os.getenv("RUN_SLOW_TESTS", "false").lower() in ("true", "1", "yes")


def _check_decomposition(a: np.ndarray, eigenvalues: np.ndarray, vectors: np.ndarray) -> None:
    """Per-eigenpair residual, orthonormality, reconstruction, trace and ordering bounds."""
    n = a.shape[0]
    norm = float(np.linalg.norm(a))
    bound = 1e-8 * max(1.0, norm)
    for i in range(n):
        residual = a @ vectors[:, i] - eigenvalues[i] * vectors[:, i]
        assert np.linalg.norm(residual) <= bound, f"eigenpair {i}"
    assert np.abs(vectors.T @ vectors - np.eye(n)).max() <= 1e-10
    assert np.linalg.norm(vectors @ np.diag(eigenvalues) @ vectors.T - a) <= 1e-8 * max(1.0, norm)
    assert eigenvalues.sum() == pytest.approx(np.trace(a), abs=bound)
    assert np.all(np.diff(eigenvalues) <= 1e-12 * max(1.0, norm))


# ============================================================================
# RANDOM
# ============================================================================

def test_same_seed_same_stream():
    a, b = RandomSource(42), RandomSource(42)
    assert [a.next_u64() for _ in range(10)] == [b.next_u64() for _ in range(10)]


def test_different_seeds_differ():
    assert RandomSource(1).next_u64() != RandomSource(2).next_u64()


def test_seed_zero_is_usable():
    rng = RandomSource(0)
    assert len({rng.next_u64() for _ in range(100)}) == 100


def test_shuffle_length_one():
    np.testing.assert_array_equal(RandomSource(3).shuffle(np.array([7])), [7])


def test_shuffle_is_a_permutation_and_copies():
    original = np.arange(50)
    out = RandomSource(5).shuffle(original)
    np.testing.assert_array_equal(np.sort(out), original)
    np.testing.assert_array_equal(original, np.arange(50))


def test_uniform01_range_and_mean():
    rng = RandomSource(11)
    draws = np.array([rng.uniform01() for _ in range(20_000)])
    assert draws.min() >= 0.0 and draws.max() < 1.0
    assert draws.mean() == pytest.approx(0.5, abs=0.01)


def test_randbelow_bounds():
    rng = RandomSource(9)
    values = {rng.randbelow(3) for _ in range(300)}
    assert values == {0, 1, 2}
    with pytest.raises(NumericsError):
        rng.randbelow(0)


def test_bootstrap_indices():
    idx = RandomSource(4).bootstrap_indices(100)
    assert idx.shape == (100,)
    assert idx.min() >= 0 and idx.max() < 100
    # with replacement: 100 draws from 100 almost surely repeat
    assert len(np.unique(idx)) < 100
    with pytest.raises(NumericsError):
        RandomSource(4).bootstrap_indices(0)


def test_sample_without_replacement():
    out = RandomSource(8).sample_without_replacement(10, 4)
    assert len(set(out.tolist())) == 4
    assert out.tolist() == sorted(out.tolist())
    with pytest.raises(NumericsError):
        RandomSource(8).sample_without_replacement(3, 4)


def test_uniform_shape_and_bounds():
    out = RandomSource(2).uniform(-0.5, 0.5, (4, 3))
    assert out.shape == (4, 3)
    assert np.all((out >= -0.5) & (out < 0.5))


def test_derive_seed_and_spawn():
    assert derive_seed(42, 1000, 3) == 1045
    assert derive_seed(2**64 - 1, 1) == 0
    a = RandomSource(7).spawn(10)
    assert a.next_u64() == rng_stream(17).next_u64()


# ============================================================================
# COVARIANCE
# ============================================================================

def test_covariance_single_column():
    """Sample variance of [1, 2, 3] is 1."""
    np.testing.assert_allclose(covariance(np.array([[1.0], [2.0], [3.0]])), [[1.0]])


def test_covariance_matches_numpy():
    x = np.random.default_rng(0).normal(size=(40, 5))
    np.testing.assert_allclose(covariance(x), np.cov(x, rowvar=False), atol=1e-12)


def test_covariance_needs_two_rows():
    with pytest.raises(NumericsError):
        covariance(np.ones((1, 3)))


# ============================================================================
# EIGENSOLVER
# ============================================================================

def test_eigh_identity():
    values, vectors = eigh_symmetric(np.eye(3))
    np.testing.assert_array_equal(values, [1.0, 1.0, 1.0])
    np.testing.assert_array_equal(vectors, np.eye(3))


def test_eigh_diagonal_sorted_descending():
    values, vectors = eigh_symmetric(np.diag([1.0, 3.0, 2.0]))
    np.testing.assert_array_equal(values, [3.0, 2.0, 1.0])
    np.testing.assert_array_equal(np.abs(vectors), np.eye(3)[:, [1, 2, 0]])


def test_eigh_two_by_two():
    values, vectors = eigh_symmetric(np.array([[2.0, 1.0], [1.0, 2.0]]))
    np.testing.assert_allclose(values, [3.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(vectors[:, 0], [np.sqrt(0.5), np.sqrt(0.5)], atol=1e-12)


def test_eigh_sign_convention():
    """Largest-magnitude entry of each eigenvector is positive."""
    a = np.random.default_rng(1).normal(size=(6, 6))
    _, vectors = eigh_symmetric(a + a.T)
    pivots = np.argmax(np.abs(vectors), axis=0)
    assert np.all(vectors[pivots, np.arange(6)] > 0)


def test_eigh_random_matches_decomposition():
    rng = np.random.default_rng(2)
    for n in (1, 2, 5, 12):
        b = rng.normal(size=(n, n))
        a = b + b.T
        values, vectors = eigh_symmetric(a)
        _check_decomposition(a, values, vectors)
        np.testing.assert_allclose(values, np.sort(np.linalg.eigvalsh(a))[::-1], atol=1e-9)


def test_off_diagonal_norm_of_nearly_diagonal_matrix():
    a = np.diag([10.0, 5.0, 1.0])
    a[0, 1] = a[1, 0] = 1e-9
    assert _off_diagonal_norm(a) == pytest.approx(np.sqrt(2.0) * 1e-9, rel=1e-12)


def test_eigh_nearly_diagonal_is_rotated_to_full_precision():
    """Off-diagonal mass far below the diagonal scale still gets rotated away."""
    a = np.diag([10.0, 5.0, 1.0])
    a[np.triu_indices(3, 1)] = 1e-9
    a = a + np.triu(a, 1).T
    values, vectors = eigh_symmetric(a)
    _check_decomposition(a, values, vectors)
    for i in range(3):
        residual = a @ vectors[:, i] - values[i] * vectors[:, i]
        assert np.linalg.norm(residual) <= 1e-14 * np.linalg.norm(a)


def test_eigh_rejects_bad_input():
    with pytest.raises(NumericsError):
        eigh_symmetric(np.ones((2, 3)))
    with pytest.raises(NumericsError):
        eigh_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NumericsError):
        eigh_symmetric(np.array([[np.nan, 0.0], [0.0, 1.0]]))


@pytest.mark.slow
@pytest.mark.skipif(not RUN_SLOW_TESTS, reason="Set RUN_SLOW_TESTS=true to run the 1,000-matrix sweep")
def test_eigh_thousand_random_matrices():
    """Random symmetric matrices up to 30 x 30 satisfy residual, orthonormality and trace bounds."""
    rng = np.random.default_rng(1234)
    for _ in range(1000):
        n = int(rng.integers(1, 31))
        b = rng.normal(size=(n, n))
        a = (b + b.T) / 2.0
        values, vectors = eigh_symmetric(a)
        _check_decomposition(a, values, vectors)
