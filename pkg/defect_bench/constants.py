"""Benchmark constants.

This module provides easy access to configuration constants from config.yaml
together with the fixed values every run depends on.
"""

from defect_bench.config import get_config

# Lazy-load configuration
_config = None


def _get_config():
    """Get configuration instance (lazy-loaded)."""
    global _config
    if _config is None:
        _config = get_config()
    return _config


# Cross-validation defaults
def get_default_k() -> int:
    """Number of cross-validation folds."""
    return int(_get_config().cv_settings.get("k", 10))


def get_default_master_seed() -> int:
    """Master seed every derived stream starts from."""
    return int(_get_config().cv_settings.get("master_seed", 42))


def get_pca_datasets() -> list[str]:
    """Datasets that get PCA unless a benchmark config says otherwise."""
    return list(_get_config().study_settings.get("pca_datasets", ["JM1", "KC1_CL"]))


def get_data_dir() -> str:
    """Directory holding `<NAME>.arff` fixtures."""
    return str(_get_config().app_settings.get("data_dir", "data"))


def get_output_dir() -> str:
    """Default directory for benchmark artifacts."""
    return str(_get_config().app_settings.get("output_dir", "output"))


# Serialized document version (pipelines, models, tables)
FORMAT_VERSION = 1

# Clamp applied to probabilities before any logarithm
PROBA_EPS = 1e-12

# Stable per-role offsets added to the master seed
SEED_OFFSET_FOLDS = 0
SEED_OFFSET_MODEL = 1_000
SEED_OFFSET_VALIDATION = 2_000

UINT64_MASK = (1 << 64) - 1

# Labels that mark a module as defective
DEFECTIVE_TOKENS = frozenset({"true", "yes", "y", "1"})
CLEAN_TOKENS = frozenset({"false", "no", "n", "0"})
CLASS_ATTRIBUTE_NAMES = ("defects", "label", "problems")

# Published dataset characteristics: (attributes, instances, percent faulty),
# transcribed from the defect prediction study this benchmark replicates.
PUBLISHED_PROFILES: dict[str, tuple[int, int, float]] = {
    "CM1": (22, 498, 9.83),
    "JM1": (22, 10_885, 19.35),
    "KC1": (22, 2_109, 15.45),
    "KC2": (22, 522, 20.50),
    "PC1": (22, 1_109, 6.94),
    "AT": (9, 130, 8.46),
    "KC1_CL": (95, 145, 44.82),
}

# Published comparative results of the same study, transcribed as printed:
# mean 10-fold CV accuracy in percent, rows mapped to model kinds.
PUBLISHED_ACCURACY: dict[str, dict[str, float]] = {
    "logistic_regression": {"CM1": 85.1, "JM1": 70.6, "KC1": 80.1, "KC2": 83.7, "PC1": 79.8, "AT": 81.0, "KC1_CL": 80.5},
    "naive_bayes": {"CM1": 82.9, "JM1": 77.0, "KC1": 75.0, "KC2": 81.7, "PC1": 81.1, "AT": 72.7, "KC1_CL": 73.7},
    "gradient_boosting": {"CM1": 88.0, "JM1": 78.7, "KC1": 87.5, "KC2": 84.0, "PC1": 86.0, "AT": 87.0, "KC1_CL": 89.5},
    "svm": {"CM1": 85.0, "JM1": 75.4, "KC1": 83.0, "KC2": 86.0, "PC1": 85.0, "AT": 88.0, "KC1_CL": 78.0},
    "random_forest": {"CM1": 83.0, "JM1": 76.9, "KC1": 85.0, "KC2": 79.0, "PC1": 89.0, "AT": 91.2, "KC1_CL": 81.0},
    "ann": {"CM1": 80.0, "JM1": 83.4, "KC1": 83.0, "KC2": 88.9, "PC1": 93.0, "AT": 90.0, "KC1_CL": 79.0},
}

# Display order of the results grid
MODEL_ORDER = ("logistic_regression", "naive_bayes", "gradient_boosting", "svm", "random_forest", "ann")
DATASET_ORDER = ("CM1", "JM1", "KC1", "KC2", "PC1", "AT", "KC1_CL")

MODEL_LABELS = {
    "logistic_regression": "Logistic Regression",
    "naive_bayes": "Naive Bayes",
    "gradient_boosting": "Gradient Boosting Classifier",
    "svm": "Support Vector Machine",
    "random_forest": "Random Forest",
    "ann": "ANN",
}
