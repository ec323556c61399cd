"""Classifier families behind one train/predict contract."""
