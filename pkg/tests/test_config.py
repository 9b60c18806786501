"""Tests for ConfigManager."""

from __future__ import annotations

from pathlib import Path

import pytest

from nclebesgue.core.config import AppConfig, ConfigManager
from nclebesgue.core.exceptions import ConfigError
from nclebesgue.core.instance import InstanceFile
from nclebesgue.utils import resolve_tolerance

from _helpers import load_fixture

DEFAULT_YAML = Path(__file__).resolve().parents[1] / "config" / "default.yaml"


def _manager(tmp_path: Path, yaml_text: str | None = None, env_text: str | None = None) -> ConfigManager:
    config_mgr = ConfigManager(project_root=tmp_path)
    config_mgr._config_path = tmp_path / "config.yaml"
    config_mgr._env_path = tmp_path / ".env"
    if yaml_text is not None:
        config_mgr._config_path.write_text(yaml_text)
    if env_text is not None:
        config_mgr._env_path.write_text(env_text)
    return config_mgr


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for key in ("NCLEBESGUE_TOL_RANK", "NCLEBESGUE_TOL_EQ", "NCLEBESGUE_TOL_PSD", "NCLEBESGUE_OUTPUT", "NCLEBESGUE_WORKERS"):
        monkeypatch.delenv(key, raising=False)


def test_config_manager_defaults(tmp_path: Path) -> None:
    """Without .env or YAML, config uses defaults."""
    config = _manager(tmp_path).load()
    assert config.tolerance.rank_rel == 1e-9
    assert config.report.output == "json"
    assert config.report.float_digits == 12
    assert config.pipeline.stages == ["info", "decompose", "derivative", "kms"]
    assert config.pipeline.stop_on_failure is True
    assert config.spinchain.max_sites == 6
    assert config.witness.n_terms == 8
    assert config.batch.workers == 4


def test_shipped_default_yaml_matches_defaults() -> None:
    """config/default.yaml spells out the built-in defaults."""
    config_mgr = ConfigManager(project_root=DEFAULT_YAML.parents[1], config_path=DEFAULT_YAML)
    config_mgr._env_path = DEFAULT_YAML.parent / "missing.env"
    assert config_mgr.load() == AppConfig()


def test_config_manager_load_yaml(tmp_path: Path) -> None:
    """YAML file overrides defaults."""
    config = _manager(
        tmp_path,
        """
tolerance:
  eq_abs: 1.0e-7
report:
  output: text
pipeline:
  stages: [info, kms]
  stop_on_failure: false
""",
    ).load()
    assert config.tolerance.eq_abs == 1e-7
    assert config.tolerance.rank_rel == 1e-9
    assert config.report.output == "text"
    assert config.pipeline.stages == ["info", "kms"]
    assert config.pipeline.stop_on_failure is False


def test_config_manager_env_file_overrides_yaml(tmp_path: Path) -> None:
    config = _manager(
        tmp_path,
        "report:\n  output: json\n",
        "NCLEBESGUE_OUTPUT=text\nNCLEBESGUE_TOL_EQ=1e-6\n",
    ).load()
    assert config.report.output == "text"
    assert config.tolerance.eq_abs == 1e-6


def test_process_environment_overrides_env_file(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("NCLEBESGUE_WORKERS", "2")
    config = _manager(tmp_path, env_text="NCLEBESGUE_WORKERS=8\n").load()
    assert config.batch.workers == 2


def test_config_manager_project_root(tmp_path: Path) -> None:
    """Project root is set from constructor."""
    root = tmp_path / "proj"
    root.mkdir()
    (root / "pyproject.toml").write_text("[project]\nname = 'x'\n")
    config_mgr = ConfigManager(project_root=root)
    assert config_mgr.project_root == root.resolve()


def test_config_manager_malformed_yaml(tmp_path: Path) -> None:
    """Malformed YAML logs warning and returns defaults."""
    config = _manager(tmp_path, "report: [unterminated\n").load()
    assert config.report.output == "json"


def test_config_manager_invalid_value(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        _manager(tmp_path, "tolerance:\n  rank_rel: 2.0\n").load()


def test_config_manager_invalid_env_value(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        _manager(tmp_path, env_text="NCLEBESGUE_OUTPUT=xml\n").load()


# ---------------------------------------------------------------------------
# Tolerance precedence
# ---------------------------------------------------------------------------


def test_tolerance_precedence(tmp_path: Path) -> None:
    """Config, then instance overrides, then explicit flags."""
    config = _manager(tmp_path, "tolerance:\n  eq_abs: 1.0e-8\n  psd_slack: 1.0e-8\n").load()
    data = load_fixture("m2_pair.json").model_dump()
    data["tolerance"] = {"eq_abs": 1e-7, "psd_slack": 1e-7}
    inst = InstanceFile.model_validate(data)
    tol = resolve_tolerance(config, inst, psd_slack=1e-6)
    assert tol.rank_rel == 1e-9
    assert tol.eq_abs == 1e-7
    assert tol.psd_slack == 1e-6
