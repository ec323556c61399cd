"""Dataset ingestion: ARFF/CSV parsing, imputation and profiling."""
