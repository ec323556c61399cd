"""Software defect prediction benchmark on NASA Promise static code metrics."""

__version__ = "0.1.0"
