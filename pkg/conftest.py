"""Shared pytest fixtures: seeded synthetic datasets and optional real fixtures."""

from pathlib import Path

import numpy as np
import pytest

from defect_bench.config import reset_config
from defect_bench.models.dataset import Dataset

DATA_DIR = Path(__file__).parent / "data"


def fixture_path(name: str) -> Path:
    """Path of a Promise dataset fixture under data/."""
    return DATA_DIR / f"{name}.arff"


def have_fixture(name: str) -> bool:
    return fixture_path(name).is_file()


def make_blobs(n: int = 200, p: int = 2, separation: float = 6.0, seed: int = 0) -> Dataset:
    """Two unit-variance Gaussian blobs whose centres are `separation` apart along every axis' diagonal."""
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 2
    offset = separation / np.sqrt(p)
    features = rng.normal(size=(n, p)) + np.where(labels[:, None] == 1, offset / 2, -offset / 2)
    return Dataset(
        name="BLOBS",
        features=features,
        labels=labels,
        feature_names=[f"x{j}" for j in range(p)],
    )


def make_threshold_data(n: int = 300, p: int = 3, margin: float = 0.5, seed: int = 0) -> Dataset:
    """class = feature0 > 0, with no feature0 value inside (-margin, margin)."""
    rng = np.random.default_rng(seed)
    features = rng.normal(size=(n, p))
    labels = np.arange(n) % 2
    magnitude = margin + rng.exponential(1.0, size=n)
    features[:, 0] = np.where(labels == 1, magnitude, -magnitude)
    return Dataset(
        name="THRESHOLD",
        features=features,
        labels=labels,
        feature_names=[f"f{j}" for j in range(p)],
    )


@pytest.fixture
def blobs() -> Dataset:
    return make_blobs()


@pytest.fixture
def threshold_data() -> Dataset:
    return make_threshold_data()


@pytest.fixture
def tiny_arff() -> str:
    return (
        "% minimal document\n"
        "@relation tiny\n"
        "@attribute loc numeric\n"
        "@attribute defects {false,true}\n"
        "@data\n"
        "1.0,false\n"
        "2.0,true\n"
    )


@pytest.fixture(autouse=True)
def _fresh_config(monkeypatch):
    """Every test sees default settings, independent of the developer's environment."""
    for var in ("DEFECT_BENCH_LOG_LEVEL", "DEFECT_BENCH_LOG_FORMAT", "DEFECT_BENCH_CONFIG", "NO_COLOR"):
        monkeypatch.delenv(var, raising=False)
    reset_config()
    yield
    reset_config()
