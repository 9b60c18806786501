"""Tolerances, report format and pipeline defaults.

Sources, lowest first: `AppConfig` defaults, `config/default.yaml`, the project `.env`, the process
environment (`NCLEBESGUE_*`). Instance-file tolerances and CLI flags are applied later by the CLI.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, ValidationError

from nclebesgue.core.exceptions import ConfigError
from nclebesgue.linalg.numerics import Tolerance

log = logging.getLogger(__name__)


def _find_project_root(start: Path | None = None) -> Path:
    """Nearest directory at or above ``start`` holding a pyproject.toml, else the cwd."""
    here = Path(start or Path.cwd()).resolve()
    roots = (d for d in (here, *here.parents) if (d / "pyproject.toml").exists())
    return next(roots, Path.cwd().resolve())


class ToleranceConfigModel(BaseModel):
    """Tolerance section of config."""

    rank_rel: float = Field(default=1e-9, gt=0.0, lt=1.0)
    eq_abs: float = Field(default=1e-9, gt=0.0)
    psd_slack: float = Field(default=1e-9, gt=0.0)

    def to_tolerance(self) -> Tolerance:
        return Tolerance(rank_rel=self.rank_rel, eq_abs=self.eq_abs, psd_slack=self.psd_slack)


class ReportConfigModel(BaseModel):
    """Report section of config."""

    output: Literal["json", "text"] = "json"
    float_digits: int = Field(default=12, ge=1, le=17)
    zero_floor: float = Field(default=1e-12, ge=0.0)


class SpinChainConfigModel(BaseModel):
    """Defaults for ``nclebesgue spinchain``."""

    model: Literal["ising", "heisenberg", "xy"] = "ising"
    coupling: float = 1.0
    field: float = 0.5
    beta: float = Field(default=1.0, ge=0.0)
    perturbation: float = Field(default=0.1, ge=0.0, le=1.0)
    seed: int = 0
    max_sites: int = Field(default=6, ge=1)


class WitnessConfigModel(BaseModel):
    n_terms: int = Field(default=8, ge=1)


class PipelineConfigModel(BaseModel):
    """Pipeline section of config."""

    stages: list[str] = Field(default_factory=lambda: ["info", "decompose", "derivative", "kms"])
    skip_stages: list[str] = Field(default_factory=list)
    stop_on_failure: bool = True


class BatchConfigModel(BaseModel):
    workers: int = Field(default=4, ge=1)


class AppConfig(BaseModel):
    """All configuration sections; `config/default.yaml` mirrors these defaults."""

    tolerance: ToleranceConfigModel = Field(default_factory=ToleranceConfigModel)
    report: ReportConfigModel = Field(default_factory=ReportConfigModel)
    spinchain: SpinChainConfigModel = Field(default_factory=SpinChainConfigModel)
    witness: WitnessConfigModel = Field(default_factory=WitnessConfigModel)
    pipeline: PipelineConfigModel = Field(default_factory=PipelineConfigModel)
    batch: BatchConfigModel = Field(default_factory=BatchConfigModel)


# Environment variable -> (section, key)
ENV_MAPPING: dict[str, tuple[str, str]] = {
    "NCLEBESGUE_TOL_RANK": ("tolerance", "rank_rel"),
    "NCLEBESGUE_TOL_EQ": ("tolerance", "eq_abs"),
    "NCLEBESGUE_TOL_PSD": ("tolerance", "psd_slack"),
    "NCLEBESGUE_OUTPUT": ("report", "output"),
    "NCLEBESGUE_WORKERS": ("batch", "workers"),
}


class ConfigManager:
    """Load and merge configuration from .env, the process environment and YAML."""

    def __init__(
        self,
        project_root: Path | None = None,
        env_path: Path | None = None,
        config_path: Path | None = None,
    ) -> None:
        self._root = Path(project_root or _find_project_root()).resolve()
        self._env_path = Path(env_path) if env_path else self._root / ".env"
        self._config_path = Path(config_path) if config_path else self._root / "config" / "default.yaml"
        self._config: AppConfig | None = None
        self._env: dict[str, str] = {}

    def load_env(self) -> dict[str, str]:
        """Read `.env` into a dict; os.environ is left alone."""
        try:
            from dotenv import dotenv_values
        except ImportError:
            log.debug("python-dotenv not installed; skipping .env loading")
            self._env = {}
            return self._env
        try:
            self._env = {k: v for k, v in dotenv_values(self._env_path).items() if v is not None}
            return self._env
        except (OSError, PermissionError) as e:
            log.warning("Failed to read .env file %s: %s", self._env_path, e)
            self._env = {}
            return self._env

    def load_yaml(self) -> dict[str, Any]:
        """Sections from the YAML file, or {} when it is absent or unreadable."""
        if not self._config_path.exists():
            return {}
        try:
            import yaml
        except ImportError:
            log.warning("pyyaml not installed; skipping YAML config loading")
            return {}
        try:
            with open(self._config_path, encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except (OSError, PermissionError) as e:
            log.warning("Failed to read config file %s: %s", self._config_path, e)
            return {}
        except yaml.YAMLError as e:
            log.warning("Malformed YAML in %s: %s", self._config_path, e)
            return {}
        if not isinstance(data, dict):
            log.warning("Config file %s is not a mapping; ignoring it", self._config_path)
            return {}
        return data

    def load(self) -> AppConfig:
        """Merge defaults, YAML, `.env` and the environment into a validated `AppConfig`.

        Raises:
            ConfigError: if a merged value fails validation.
        """
        env = self.load_env()
        yaml_data = self.load_yaml()

        config_dict: dict[str, dict[str, Any]] = {
            section: dict(yaml_data.get(section) or {}) for section in AppConfig.model_fields
        }
        # .env first, then the process environment; both override YAML
        merged_env = {**env, **{k: v for k, v in os.environ.items() if k in ENV_MAPPING}}
        for env_key, (section, key) in ENV_MAPPING.items():
            if merged_env.get(env_key):
                config_dict[section][key] = merged_env[env_key]

        try:
            self._config = AppConfig(**config_dict)
        except ValidationError as e:
            raise ConfigError(f"invalid configuration: {e}") from e
        return self._config

    @property
    def config(self) -> AppConfig:
        return self._config if self._config is not None else self.load()

    @property
    def env(self) -> dict[str, str]:
        if not self._env and self._env_path.exists():
            self.load_env()
        return self._env

    @property
    def project_root(self) -> Path:
        return self._root
