"""Centralized JSON logging configuration for benchmark runs."""

import logging
import os
import sys
import time
import uuid
from contextvars import ContextVar
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from pythonjsonlogger.json import JsonFormatter

# Context variable to store the run ID across workers in one process
run_context: ContextVar[Optional[str]] = ContextVar("run_context", default=None)


class BenchJsonFormatter(JsonFormatter):
    """JSON formatter adding timestamp, level, logger and run context fields."""

    def add_fields(
        self,
        log_record: Dict[str, Any],
        record: logging.LogRecord,
        message_dict: Dict[str, Any],
    ) -> None:
        """Populate the standard fields on every record."""
        super().add_fields(log_record, record, message_dict)
        log_record["timestamp"] = (
            datetime.fromtimestamp(record.created, tz=timezone.utc)
            .isoformat(timespec="milliseconds")
            .replace("+00:00", "Z")
        )
        log_record["level"] = record.levelname
        log_record["logger"] = record.name

        # Prefer explicit run_id on the record, fall back to context.
        run_id = log_record.get("run_id") or run_context.get()
        if run_id:
            log_record["run_id"] = run_id


def _json_default(value: Any) -> Any:
    """Provide JSON-safe fallbacks for non-serializable objects."""
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if isinstance(value, os.PathLike):
        return os.fspath(value)
    if hasattr(value, "tolist"):
        return value.tolist()
    return str(value)


def setup_json_logging(level: str = "WARNING", fmt: str = "json") -> None:
    """
    Configure logging for the process.

    Records go to stderr so that command output on stdout stays parseable.

    Args:
        level: Logging level (default: WARNING)
        fmt: "json" for structured records, "plain" for human-readable lines
    """
    log_level = getattr(logging, level.upper(), logging.WARNING)

    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(log_level)
    if fmt == "plain":
        handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
        )
    else:
        handler.setFormatter(BenchJsonFormatter(json_default=_json_default))

    logging.basicConfig(level=log_level, handlers=[handler], force=True)
    logging.captureWarnings(True)

    # Silence noisy loggers
    logging.getLogger("joblib").setLevel(logging.WARNING)


def generate_run_id() -> str:
    """
    Generate a unique run ID for tracking a benchmark invocation.

    Returns:
        UUID string for run tracking
    """
    return str(uuid.uuid4())


def set_run_context(run_id: str) -> None:
    """Set the run ID in the context variable."""
    run_context.set(run_id)


def get_run_context() -> Optional[str]:
    """Get the current run ID from context."""
    return run_context.get()


def clear_run_context() -> None:
    """Clear the run ID from context."""
    run_context.set(None)


class RunLogger:
    """Logger wrapper that automatically includes run context."""

    def __init__(self, logger: logging.Logger):
        self.logger = logger

    def _log(
        self, level: int, msg: str, extra: Optional[Dict[str, Any]] = None, **kwargs
    ) -> None:
        """Internal log method that adds run context."""
        if not self.logger.isEnabledFor(level):
            return
        extra = dict(extra or {})

        if "run_id" not in extra:
            run_id = get_run_context()
            if run_id:
                extra["run_id"] = run_id

        self.logger.log(level, msg, extra=extra, **kwargs)

    def info(self, msg: str, extra: Optional[Dict[str, Any]] = None, **kwargs) -> None:
        """Log INFO level message."""
        self._log(logging.INFO, msg, extra, **kwargs)

    def warning(
        self, msg: str, extra: Optional[Dict[str, Any]] = None, **kwargs
    ) -> None:
        """Log WARNING level message."""
        self._log(logging.WARNING, msg, extra, **kwargs)

    def error(self, msg: str, extra: Optional[Dict[str, Any]] = None, **kwargs) -> None:
        """Log ERROR level message."""
        self._log(logging.ERROR, msg, extra, **kwargs)

    def debug(self, msg: str, extra: Optional[Dict[str, Any]] = None, **kwargs) -> None:
        """Log DEBUG level message."""
        self._log(logging.DEBUG, msg, extra, **kwargs)


def get_logger(name: str) -> RunLogger:
    """
    Get a run-aware logger instance.

    Args:
        name: Logger name (typically __name__)

    Returns:
        RunLogger instance
    """
    return RunLogger(logging.getLogger(name))


class TimingContext:
    """Context manager for timing operations.

    `duration_ms` is available after the block exits, whether or not it raised.
    """

    def __init__(
        self,
        logger: RunLogger,
        operation: str,
        extra: Optional[Dict[str, Any]] = None,
        level: int = logging.DEBUG,
    ):
        self.logger = logger
        self.operation = operation
        self.extra = extra or {}
        self.level = level
        self.start_time: float | None = None
        self.duration_ms: int = 0

    def __enter__(self):
        """Start timing."""
        self.start_time = time.perf_counter()
        self.logger._log(self.level, f"{self.operation} started", extra=self.extra)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        """End timing and log duration."""
        self.duration_ms = int((time.perf_counter() - self.start_time) * 1000)
        log_extra = {**self.extra, "duration_ms": self.duration_ms}

        if exc_type is None:
            self.logger._log(self.level, f"{self.operation} completed", extra=log_extra)
        else:
            log_extra["error_type"] = exc_type.__name__
            self.logger.error(f"{self.operation} failed", extra=log_extra)
