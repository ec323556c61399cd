"""Utility modules for the defect prediction benchmark."""
