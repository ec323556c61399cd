"""Configuration management for the defect prediction benchmark."""

import os
from pathlib import Path
from typing import Any, Dict

import yaml
from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables from .env file before Settings instantiation
load_dotenv()

_DEFAULT_YAML: Dict[str, Any] = {
    "app": {"data_dir": "data", "output_dir": "output", "jobs": None},
    "cv": {"k": 10, "master_seed": 42},
    "study": {
        "pca_datasets": ["JM1", "KC1_CL"],
        "datasets": ["CM1", "JM1", "KC1", "KC2", "PC1", "AT", "KC1_CL"],
    },
}


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    log_level: str = Field("WARNING", alias="DEFECT_BENCH_LOG_LEVEL")
    log_format: str = Field("json", alias="DEFECT_BENCH_LOG_FORMAT")
    config_path: str = Field("config.yaml", alias="DEFECT_BENCH_CONFIG")

    # Presence alone disables colour (https://no-color.org)
    no_color: str | None = Field(None, alias="NO_COLOR")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @property
    def color_enabled(self) -> bool:
        """Whether ANSI colour may be written to a terminal."""
        return self.no_color is None


class Config:
    """Configuration manager that combines YAML config and environment settings."""

    def __init__(self, config_path: str | None = None):
        """Initialize configuration from YAML file and environment variables.

        A missing YAML file is not an error: the CLI has to work from any
        directory, so the built-in defaults are used instead.
        """
        self.settings = Settings()
        config_file = Path(config_path or self.settings.config_path)

        self.yaml_config: Dict[str, Any] = {
            key: dict(value) for key, value in _DEFAULT_YAML.items()
        }
        self.source: Path | None = None
        if config_file.exists():
            with open(config_file, "r", encoding="utf-8") as f:
                loaded = yaml.safe_load(f) or {}
            for section, values in loaded.items():
                self.yaml_config.setdefault(section, {}).update(values or {})
            self.source = config_file

    @property
    def app_settings(self) -> Dict[str, Any]:
        """Get application settings."""
        return self.yaml_config.get("app", {})

    @property
    def cv_settings(self) -> Dict[str, Any]:
        """Get cross-validation settings."""
        return self.yaml_config.get("cv", {})

    @property
    def study_settings(self) -> Dict[str, Any]:
        """Get the study's experimental setup."""
        return self.yaml_config.get("study", {})

    def default_jobs(self) -> int:
        """Worker count used when neither the config nor a flag sets one."""
        jobs = self.app_settings.get("jobs")
        if jobs:
            return int(jobs)
        return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


# Global config instance
_config: Config | None = None


def get_config() -> Config:
    """Get or create the global configuration instance."""
    global _config
    if _config is None:
        _config = Config()
    return _config


def reset_config() -> None:
    """Drop the cached instance so the next get_config() re-reads env and YAML."""
    global _config
    _config = None
