"""Tests for the Pearson filter, PCA and the fit-on-train pipeline."""

import numpy as np
import pytest

from conftest import make_blobs
from defect_bench.errors import NumericsError, PreprocessError
from defect_bench.models.dataset import Dataset
from defect_bench.models.pipeline import FittedPipeline, PipelineConfig
from defect_bench.preprocess.correlation import constant_columns, correlation_filter, pearson_correlation
from defect_bench.preprocess.pca import fit_pca, project, reconstruct
from defect_bench.preprocess.pipeline import apply_pipeline, fit_pipeline


def _greedy_filter(x: np.ndarray, threshold: float) -> np.ndarray:
    """Reference greedy scan written independently of the package code."""
    r = np.corrcoef(x, rowvar=False)
    p = x.shape[1]
    keep = [True] * p
    for i in range(p):
        if not keep[i]:
            continue
        for j in range(i + 1, p):
            if keep[j] and abs(r[i, j]) >= threshold:
                keep[j] = False
    return np.array(keep)


# ============================================================================
# CORRELATION
# ============================================================================

def test_pearson_perfect_and_anti():
    x = np.array([[1.0, 2.0, -1.0], [2.0, 4.0, -2.0], [3.0, 6.0, -3.0]])
    r = pearson_correlation(x)
    assert r[0, 1] == pytest.approx(1.0)
    assert r[0, 2] == pytest.approx(-1.0)
    np.testing.assert_array_equal(np.diag(r), [1.0, 1.0, 1.0])


def test_pearson_constant_column_is_zero():
    x = np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]])
    r = pearson_correlation(x)
    assert r[0, 1] == 0.0
    assert constant_columns(x).tolist() == [False, True]


def test_filter_drops_duplicate_column():
    """Features {A, B = A, C}: B goes, A and C stay."""
    rng = np.random.default_rng(3)
    a = rng.normal(size=50)
    c = rng.normal(size=50)
    keep = correlation_filter(np.column_stack([a, a, c]), 0.90)
    assert keep.tolist() == [True, False, True]


def test_filter_matches_greedy_reference():
    rng = np.random.default_rng(4)
    base = rng.normal(size=(200, 4))
    x = np.column_stack(
        [
            base,
            base[:, 0] + 0.05 * rng.normal(size=200),
            -base[:, 1] + 0.3 * rng.normal(size=200),
            base[:, 2] + base[:, 3],
        ]
    )
    for threshold in (0.5, 0.7, 0.9, 0.99):
        np.testing.assert_array_equal(correlation_filter(x, threshold), _greedy_filter(x, threshold))


def test_filter_drops_constant_features():
    x = np.array([[1.0, 0.0, 3.0], [2.0, 0.0, 1.0], [3.0, 0.0, 2.0]])
    assert correlation_filter(x, 0.99).tolist() == [True, False, True]


def test_filter_all_constant_fails():
    with pytest.raises(PreprocessError):
        correlation_filter(np.ones((4, 2)), 0.9)


def test_filter_threshold_range():
    with pytest.raises(PreprocessError):
        correlation_filter(np.eye(3), 0.0)


# ============================================================================
# PCA
# ============================================================================

def test_pca_points_on_a_line():
    """Points on y = x need exactly one component."""
    t = np.linspace(-2.0, 2.0, 21)
    basis = fit_pca(np.column_stack([t, t]), 0.95)
    assert basis.n_components == 1
    np.testing.assert_allclose(np.abs(basis.components[:, 0]), [np.sqrt(0.5)] * 2, atol=1e-12)
    assert basis.cumulative_explained_ratio[0] == pytest.approx(1.0)


def test_pca_isotropic_needs_both_components():
    rng = np.random.default_rng(5)
    basis = fit_pca(rng.normal(size=(2000, 2)), 0.95)
    assert basis.n_components == 2


def test_pca_full_reconstruction():
    rng = np.random.default_rng(6)
    x = rng.normal(size=(30, 4)) @ rng.normal(size=(4, 4))
    basis = fit_pca(x, 1.0)
    assert basis.n_components == 4
    np.testing.assert_allclose(reconstruct(basis, project(basis, x)), x, atol=1e-9)


def test_pca_eigenvalues_sum_to_trace():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(50, 5))
    basis = fit_pca(x, 0.5)
    assert basis.explained_variance.sum() == pytest.approx(np.trace(np.cov(x, rowvar=False)))
    assert np.all(np.diff(basis.cumulative_explained_ratio) >= 0)


def test_pca_scores_are_uncorrelated():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(300, 3)) @ np.array([[2.0, 0.5, 0.0], [0.0, 1.0, 0.3], [0.0, 0.0, 0.2]])
    basis = fit_pca(x, 1.0)
    cov = np.cov(project(basis, x), rowvar=False)
    off = cov - np.diag(np.diag(cov))
    assert np.abs(off).max() < 1e-9


def test_pca_components_orthonormal_and_reconstruct():
    rng = np.random.default_rng(14)
    x = rng.normal(size=(60, 6)) @ rng.normal(size=(6, 6))
    basis = fit_pca(x, 1.0)
    v = basis.components
    assert np.abs(v.T @ v - np.eye(v.shape[1])).max() <= 1e-10
    assert np.abs(reconstruct(basis, project(basis, x)) - x).max() <= 1e-8
    scores = np.corrcoef(project(basis, x), rowvar=False)
    assert np.abs(scores - np.eye(v.shape[1])).max() <= 1e-6


def test_pca_rejects_bad_target():
    with pytest.raises(NumericsError):
        fit_pca(np.eye(3), 0.0)


# ============================================================================
# PIPELINE
# ============================================================================

def test_pipeline_standardizes_training_rows():
    d = make_blobs(n=100, p=3, seed=9)
    p = fit_pipeline(d, PipelineConfig())
    z = apply_pipeline(p, d.features)
    np.testing.assert_allclose(z.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(z.std(axis=0, ddof=1), 1.0, atol=1e-12)


def test_pipeline_identity_when_everything_is_off():
    d = make_blobs(n=40, p=2, seed=10)
    p = fit_pipeline(d, PipelineConfig(standardize=False, correlation_threshold=1.0))
    np.testing.assert_array_equal(apply_pipeline(p, d.features), d.features)


def test_pipeline_with_pca_output_width():
    rng = np.random.default_rng(11)
    t = rng.normal(size=(80, 1))
    features = np.hstack([t, t + 0.5 * rng.normal(size=(80, 1)), rng.normal(size=(80, 2))])
    d = Dataset(name="P", features=features, labels=np.arange(80) % 2, feature_names=["a", "b", "c", "e"])
    p = fit_pipeline(d, PipelineConfig(use_pca=True, pca_variance_target=0.95))
    out = apply_pipeline(p, features)
    assert out.shape == (80, p.n_output_features)
    assert p.n_output_features == p.pca.n_components


def test_pipeline_constant_feature_is_dropped():
    features = np.column_stack([np.arange(6.0), np.full(6, 2.0)])
    d = Dataset(name="C", features=features, labels=np.array([0, 1] * 3), feature_names=["a", "k"])
    p = fit_pipeline(d, PipelineConfig())
    assert p.kept_feature_names == ["a"]
    assert p.stds[1] == 0.0
    assert np.isfinite(apply_pipeline(p, features)).all()


def test_pipeline_uses_training_rows_only():
    """Changing the test rows does not change what was fitted on the train rows."""
    d = make_blobs(n=60, p=3, seed=12)
    train = d.subset(np.arange(40))
    p1 = fit_pipeline(train, PipelineConfig(use_pca=True))
    shifted = d.features.copy()
    shifted[40:] += 1000.0
    p2 = fit_pipeline(d.with_features(shifted).subset(np.arange(40)), PipelineConfig(use_pca=True))
    assert p1.to_json() == p2.to_json()


def test_pipeline_rejects_missing_and_wrong_width():
    d = Dataset(name="M", features=np.array([[1.0], [np.nan]]), labels=np.array([0, 1]), feature_names=["a"])
    with pytest.raises(PreprocessError):
        fit_pipeline(d, PipelineConfig())
    p = fit_pipeline(make_blobs(n=20, p=2), PipelineConfig())
    with pytest.raises(PreprocessError):
        apply_pipeline(p, np.zeros((3, 5)))


def test_pipeline_json_round_trip():
    p = fit_pipeline(make_blobs(n=30, p=3, seed=13), PipelineConfig(use_pca=True))
    again = FittedPipeline.from_json(p.to_json())
    assert again.to_json() == p.to_json()
