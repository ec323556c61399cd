"""Tests for dataset ingest: ARFF/CSV parsing, imputation and profiling.

Tests against the real Promise files run only when data/<NAME>.arff exists.
"""

import math

import numpy as np
import pytest

from conftest import fixture_path, have_fixture
from defect_bench.errors import (
    ArityError,
    ClassAttributeError,
    EmptyDataError,
    ImputationError,
    MalformedHeaderError,
    NominalFeatureError,
    NonNumericValueError,
    UnknownColumnError,
)
from defect_bench.ingest.arff import parse_arff, serialize_arff
from defect_bench.ingest.csv_reader import default_label_column, parse_csv, serialize_csv
from defect_bench.ingest.impute import column_medians, impute_missing
from defect_bench.ingest.loader import load_dataset
from defect_bench.ingest.profile import profile, profile_matches_published
from defect_bench.models.dataset import Dataset, normalize_dataset_name

HAVE_CM1 = have_fixture("CM1")
HAVE_KC1_CL = have_fixture("KC1_CL")


def _with_missing() -> Dataset:
    return Dataset(
        name="gaps",
        features=np.array([[1.0, 5.0], [np.nan, 6.0], [3.0, np.nan]]),
        labels=np.array([0, 1, 1]),
        feature_names=["a", "b"],
    )


# ============================================================================
# ARFF
# ============================================================================

def test_parse_minimal_arff(tiny_arff):
    """Two rows, one numeric feature, nominal class mapped to {0, 1}."""
    d = parse_arff(tiny_arff, name="tiny")
    assert d.name == "TINY"
    assert d.features.shape == (2, 1)
    np.testing.assert_array_equal(d.features[:, 0], [1.0, 2.0])
    np.testing.assert_array_equal(d.labels, [0, 1])
    assert d.feature_names == ["loc"]


def test_relation_name_used_when_no_override(tiny_arff):
    assert parse_arff(tiny_arff).name == "TINY"


def test_arity_error_reports_line():
    """A short row fails with the 1-based line number of that row."""
    text = "@relation r\n@attribute a numeric\n@attribute b numeric\n@attribute defects {false,true}\n@data\n1,2,true\n1,false\n"
    with pytest.raises(ArityError) as exc:
        parse_arff(text)
    assert exc.value.line == 7


def test_missing_values_become_nan():
    text = "@relation r\n@attribute a numeric\n@attribute defects {N,Y}\n@data\n?,Y\n4,N\n"
    d = parse_arff(text)
    assert math.isnan(d.features[0, 0])
    assert d.missing_count == 1
    np.testing.assert_array_equal(d.labels, [1, 0])


def test_keywords_case_insensitive_and_crlf():
    text = "@RELATION r\r\n@Attribute 'lines of code' REAL\r\n@ATTRIBUTE defects {false,true}\r\n@DATA\r\n3.5,true\r\n"
    d = parse_arff(text)
    assert d.feature_names == ["lines of code"]
    assert d.labels.tolist() == [1]


def test_missing_data_section():
    with pytest.raises(MalformedHeaderError):
        parse_arff("@relation r\n@attribute a numeric\n")


def test_empty_data_section():
    with pytest.raises(EmptyDataError):
        parse_arff("@relation r\n@attribute a numeric\n@attribute defects {false,true}\n@data\n")


def test_non_numeric_feature():
    text = "@relation r\n@attribute a numeric\n@attribute defects {false,true}\n@data\nabc,true\n"
    with pytest.raises(NonNumericValueError) as exc:
        parse_arff(text)
    assert exc.value.line == 5


def test_nominal_feature_rejected():
    text = "@relation r\n@attribute a {x,y}\n@attribute defects {false,true}\n@data\nx,true\n"
    with pytest.raises(NominalFeatureError):
        parse_arff(text)


def test_three_valued_class_rejected():
    text = "@relation r\n@attribute a numeric\n@attribute defects {false,true,maybe}\n@data\n1,true\n"
    with pytest.raises(ClassAttributeError):
        parse_arff(text)


def test_undeclared_label_rejected():
    text = "@relation r\n@attribute a numeric\n@attribute defects {false,true}\n@data\n1,yes\n"
    with pytest.raises(ClassAttributeError):
        parse_arff(text)


def test_arff_round_trip_preserves_dataset():
    d = _with_missing()
    again = parse_arff(serialize_arff(d), name=d.name)
    assert again == d


# ============================================================================
# CSV
# ============================================================================

def test_parse_csv_named_label():
    d = parse_csv("a,b,defects\n1,2,1\n", label_column="defects", name="one")
    assert d.n_instances == 1
    assert d.feature_names == ["a", "b"]
    np.testing.assert_array_equal(d.features, [[1.0, 2.0]])
    np.testing.assert_array_equal(d.labels, [1])


def test_parse_csv_unknown_label_column():
    with pytest.raises(UnknownColumnError):
        parse_csv("a,b,defects\n1,2,1\n", label_column="bugs")


def test_parse_csv_arity():
    with pytest.raises(ArityError) as exc:
        parse_csv("a,b,defects\n1,2,1\n3,0\n", label_column="defects")
    assert exc.value.line == 3


def test_parse_csv_boolean_labels_and_gaps():
    d = parse_csv("x,bug\n,TRUE\n2,false\n?,no\n", label_column="bug")
    assert d.missing_count == 2
    np.testing.assert_array_equal(d.labels, [1, 0, 0])


def test_default_label_column():
    assert default_label_column("loc,Problems,x\n") == "Problems"
    assert default_label_column("loc,v,y\n") == "y"


def test_csv_round_trip():
    d = _with_missing()
    text = serialize_csv(d)
    assert text.splitlines()[0] == "a,b,defects"
    assert parse_csv(text, "defects", name=d.name) == d


def test_load_dataset_by_extension(tmp_path, tiny_arff):
    arff = tmp_path / "kc1-class level.arff"
    arff.write_text(tiny_arff, encoding="utf-8")
    d = load_dataset(arff)
    assert d.name == "KC1_CLASS_LEVEL"
    assert d.source_path == str(arff)

    csv_path = tmp_path / "small.csv"
    csv_path.write_text("\ufeffa,defects\n1,0\n2,1\n", encoding="utf-8")
    assert load_dataset(csv_path).labels.tolist() == [0, 1]


def test_normalize_dataset_name():
    assert normalize_dataset_name("kc1 class-level") == "KC1_CLASS_LEVEL"
    assert normalize_dataset_name("KC1_CL") == "KC1_CL"


# ============================================================================
# IMPUTATION
# ============================================================================

def test_median_imputation():
    """[1, ?, 3] gets the median 2."""
    d = Dataset(
        name="m",
        features=np.array([[1.0], [np.nan], [3.0]]),
        labels=np.array([0, 1, 0]),
        feature_names=["a"],
    )
    out = impute_missing(d, "median")
    np.testing.assert_array_equal(out.features[:, 0], [1.0, 2.0, 3.0])
    assert out.missing_count == 0


def test_drop_rows():
    d = Dataset(
        name="m",
        features=np.array([[1.0], [np.nan], [3.0], [4.0]]),
        labels=np.array([0, 1, 1, 0]),
        feature_names=["a"],
    )
    out = impute_missing(d, "drop_rows")
    assert out.n_instances == 3
    np.testing.assert_array_equal(out.labels, [0, 1, 0])


def test_drop_rows_leaving_one_class_fails():
    d = Dataset(
        name="m",
        features=np.array([[1.0], [np.nan], [3.0]]),
        labels=np.array([0, 1, 0]),
        feature_names=["a"],
    )
    with pytest.raises(ImputationError):
        impute_missing(d, "drop_rows")


def test_imputation_is_idempotent():
    once = impute_missing(_with_missing())
    assert impute_missing(once) is once


def test_fully_missing_column():
    d = Dataset(
        name="m",
        features=np.array([[np.nan, 1.0], [np.nan, 2.0]]),
        labels=np.array([0, 1]),
        feature_names=["a", "b"],
    )
    with pytest.raises(ImputationError):
        column_medians(d)


# ============================================================================
# PROFILE
# ============================================================================

def test_profile_counts():
    p = profile(_with_missing())
    assert p.n_instances == 3
    assert p.n_faulty == 2
    assert p.faulty_fraction == pytest.approx(2 / 3)
    assert p.missing_count == 2
    a = p.per_feature_stats[0]
    assert (a.min, a.max, a.mean, a.missing_count) == (1.0, 3.0, 2.0, 1)
    assert a.std == pytest.approx(math.sqrt(2.0))


def test_profile_all_clean():
    d = Dataset(name="c", features=np.zeros((4, 1)), labels=np.zeros(4, dtype=int), feature_names=["a"])
    p = profile(d)
    assert p.faulty_fraction == 0.0
    assert p.per_feature_stats[0].std == 0.0


def test_unpublished_dataset_has_no_check():
    assert profile_matches_published(profile(_with_missing())) is None


def test_published_check_tolerances():
    """A synthetic CM1 with 21 features, 498 rows and 49 faulty passes."""
    labels = np.zeros(498, dtype=int)
    labels[:49] = 1
    d = Dataset(
        name="CM1",
        features=np.zeros((498, 21)),
        labels=labels,
        feature_names=[f"f{j}" for j in range(21)],
    )
    check = profile_matches_published(profile(d))
    assert check is not None
    assert check.ok


@pytest.mark.skipif(not HAVE_CM1, reason="data/CM1.arff not present")
def test_cm1_fixture_matches_published_profile():
    """CM1: 498 instances, 49 faulty (9.8%)."""
    d = load_dataset(fixture_path("CM1"))
    assert d.n_instances == 498
    assert d.n_faulty == 49
    check = profile_matches_published(profile(d))
    assert check is not None and check.ok


@pytest.mark.skipif(not HAVE_KC1_CL, reason="data/KC1_CL.arff not present")
def test_kc1_class_level_fixture():
    d = load_dataset(fixture_path("KC1_CL"))
    assert d.n_instances == 145
    check = profile_matches_published(profile(d))
    assert check is not None and check.instances_ok
