"""Preprocessing: standardization, correlation filtering and PCA."""
