"""Shared test helpers and factory functions for nclebesgue tests.

Import this module directly from test files::

    from _helpers import make_config_manager, random_density

Pytest fixtures that wrap these factories live in ``conftest.py``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np

from nclebesgue.core.config import ConfigManager
from nclebesgue.core.instance import (
    InstanceFile,
    LoadedInstance,
    build_instance,
    dump_instance,
    load_instance,
)
from nclebesgue.core.schema import PipelineContext
from nclebesgue.linalg.numerics import DEFAULT_TOLERANCE, Tolerance, dagger

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


# ---------------------------------------------------------------------------
# ConfigManager factory
# ---------------------------------------------------------------------------


def make_config_manager(tmp_path: Path) -> ConfigManager:
    """Create a real ConfigManager pointed at a nonexistent config/env so defaults are used."""
    mgr = ConfigManager(project_root=tmp_path)
    mgr._config_path = tmp_path / "nonexistent.yaml"
    mgr._env_path = tmp_path / ".env"
    mgr.load()
    return mgr


# ---------------------------------------------------------------------------
# Random matrices
# ---------------------------------------------------------------------------


def random_matrix(n: int, rng: np.random.Generator, cols: int | None = None) -> np.ndarray:
    cols = n if cols is None else cols
    return rng.standard_normal((n, cols)) + 1j * rng.standard_normal((n, cols))


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Hermitian matrix with operator norm ``scale``."""
    g = random_matrix(n, rng)
    h = (g + dagger(g)) / 2
    return scale * h / np.linalg.norm(h, 2)


def random_psd(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    g = random_matrix(n, rng, n if rank is None else rank)
    m = g @ dagger(g)
    return (m + dagger(m)) / 2


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Unit-trace PSD matrix of the given rank (full rank by default)."""
    m = random_psd(n, rng, rank)
    return m / np.trace(m).real


def gibbs_density(h: np.ndarray, beta: float) -> np.ndarray:
    evals, u = np.linalg.eigh(h)
    w = np.exp(-beta * (evals - evals.min()))
    w /= w.sum()
    return (u * w) @ dagger(u)


def block_diagonal(*blocks: np.ndarray) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for b in blocks:
        m = b.shape[0]
        out[k : k + m, k : k + m] = b
        k += m
    return out


# ---------------------------------------------------------------------------
# Instances and contexts
# ---------------------------------------------------------------------------


def load_fixture(name: str) -> InstanceFile:
    return load_instance(FIXTURES / name)


def write_instance(tmp_path: Path, inst: InstanceFile | dict[str, Any], name: str = "instance.json") -> Path:
    """Write an instance (model or raw dict) and return its path."""
    path = tmp_path / name
    if isinstance(inst, InstanceFile):
        path.write_text(dump_instance(inst), encoding="utf-8")
    else:
        import json

        path.write_text(json.dumps(inst), encoding="utf-8")
    return path


def make_loaded_instance(name: str, tol: Tolerance = DEFAULT_TOLERANCE) -> LoadedInstance:
    return build_instance(load_fixture(name), tol)


def make_pipeline_context(
    instance: LoadedInstance | None = None,
    *,
    mu_name: str | None = "mu",
    lambda_name: str | None = "lambda",
    tol: Tolerance = DEFAULT_TOLERANCE,
    config: dict[str, Any] | None = None,
) -> PipelineContext:
    """Build a PipelineContext around a loaded instance."""
    return PipelineContext(
        instance=instance,
        instance_name="test.json",
        mu_name=mu_name,
        lambda_name=lambda_name,
        tolerance=tol,
        config=config or {},
    )


# ---------------------------------------------------------------------------
# Report comparison
# ---------------------------------------------------------------------------


def project_onto(pinned: Any, actual: Any, path: str = "$") -> Any:
    """The part of ``actual`` that ``pinned`` spells out.

    Objects keep only the keys of ``pinned``; lists are projected element by element when the
    lengths agree and kept whole otherwise. Anything else is returned as it is in ``actual``.
    """
    if isinstance(pinned, dict):
        assert isinstance(actual, dict), f"{path}: expected an object, got {actual!r}"
        missing = sorted(set(pinned) - set(actual))
        assert not missing, f"{path}: missing keys {missing}"
        return {key: project_onto(sub, actual[key], f"{path}.{key}") for key, sub in pinned.items()}
    if isinstance(pinned, list) and isinstance(actual, list) and len(pinned) == len(actual):
        return [project_onto(p, a, f"{path}[{k}]") for k, (p, a) in enumerate(zip(pinned, actual))]
    return actual


# ---------------------------------------------------------------------------
# Registry factory
# ---------------------------------------------------------------------------


def make_registry():
    """A ComponentRegistry with the built-in stages and reporters."""
    from nclebesgue.core.registry import ComponentRegistry
    from nclebesgue.reporters import register_builtin_reporters
    from nclebesgue.stages import register_builtin_stages

    registry = ComponentRegistry()
    register_builtin_stages(registry)
    register_builtin_reporters(registry)
    return registry
