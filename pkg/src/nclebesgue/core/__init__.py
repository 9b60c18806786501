"""Framework core: config, exceptions, instances, registry, pipeline, schema, health.

Submodules are imported directly (``from nclebesgue.core.config import ConfigManager``); the
numerical packages depend on ``core.exceptions`` so this package does not import them eagerly.
"""
