"""Shared pytest fixtures for nclebesgue tests.

Factory functions live in ``_helpers.py``; this module re-exports them as
pytest fixtures so tests can receive them via dependency injection.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from nclebesgue.core.config import ConfigManager
from nclebesgue.core.instance import LoadedInstance
from nclebesgue.core.registry import ComponentRegistry
from nclebesgue.linalg.numerics import DEFAULT_TOLERANCE, Tolerance

from _helpers import (  # noqa: F401  re-export for fixture use
    make_config_manager,
    make_loaded_instance,
    make_pipeline_context,
    make_registry,
)


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture()
def config_manager(tmp_path: Path) -> ConfigManager:
    """A real ConfigManager backed by default config (no YAML/env file)."""
    return make_config_manager(tmp_path)


@pytest.fixture()
def registry() -> ComponentRegistry:
    """A registry with the built-in stages and reporters."""
    return make_registry()


@pytest.fixture()
def tol() -> Tolerance:
    return DEFAULT_TOLERANCE


@pytest.fixture()
def rng() -> np.random.Generator:
    """Seeded generator so randomized tests are reproducible."""
    return np.random.default_rng(20240611)


@pytest.fixture()
def classical_instance() -> LoadedInstance:
    return make_loaded_instance("classical_three_atom.json")


@pytest.fixture()
def m2_instance() -> LoadedInstance:
    return make_loaded_instance("m2_pair.json")


@pytest.fixture()
def spinchain_instance() -> LoadedInstance:
    return make_loaded_instance("spinchain_l2.json")
