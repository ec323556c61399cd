"""Exception hierarchy for the benchmark."""


class DefectBenchError(Exception):
    """Base class for every error raised by this package."""


# ============================================================================
# INGEST
# ============================================================================

class DatasetError(DefectBenchError):
    """A dataset cannot be read or violates the Dataset contract."""


class ParseError(DatasetError):
    """Malformed input text. `line` is 1-based, or None when not tied to a line."""

    def __init__(self, message: str, line: int | None = None):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MalformedHeaderError(ParseError):
    """Unknown or incomplete `@relation`/`@attribute`/`@data` declaration."""


class ArityError(ParseError):
    """A data row has a different number of values than declared attributes."""


class NonNumericValueError(ParseError):
    """A feature cell cannot be read as a real number."""


class ClassAttributeError(ParseError):
    """No usable binary class attribute, or a label value outside it."""


class EmptyDataError(ParseError):
    """The data section holds no rows."""


class UnknownColumnError(ParseError):
    """The requested label column is not in the CSV header."""


class NominalFeatureError(ParseError):
    """A non-class attribute is nominal; only numeric features are accepted."""


class ImputationError(DatasetError):
    """Imputation cannot produce a valid dataset."""


# ============================================================================
# NUMERICS / PREPROCESS / MODELS / EVALUATION
# ============================================================================

class NumericsError(DefectBenchError):
    """Invalid input to a numeric routine (shape, symmetry, size)."""


class PreprocessError(DefectBenchError):
    """Pipeline fit or apply failure."""


class ModelError(DefectBenchError):
    """Training or prediction failure of a classifier."""


class EvaluationError(DefectBenchError):
    """Cross-validation or benchmark precondition failure."""


class ConfigError(DefectBenchError):
    """Invalid benchmark configuration."""
