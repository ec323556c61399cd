"""Cross-validation, metrics and the benchmark runner."""
