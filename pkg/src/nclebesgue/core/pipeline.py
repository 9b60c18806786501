"""Runs the configured analysis stages over one pipeline context."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from nclebesgue.core.exceptions import PipelineError
from nclebesgue.core.registry import ComponentRegistry
from nclebesgue.core.schema import PipelineContext, PipelineResult, StageResult

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    stages: list[str]
    skip_stages: list[str] = field(default_factory=list)
    stop_on_failure: bool = True


def _skipped(name: str, reason: str) -> StageResult:
    return StageResult(stage_name=name, verdict="skipped", message=f"skipped ({reason})")


def _errored(name: str, exc: Exception) -> StageResult:
    return StageResult(stage_name=name, success=False, verdict="fail", message=str(exc))


class PipelineEngine:
    """Executes stages in ``config.stages`` order.

    A failed verdict (mu not absolutely continuous, lambda not KMS) is an answer and the run goes
    on. A stage that raises or returns ``success=False`` ends the run when ``stop_on_failure`` is
    set; otherwise later stages run, except those whose ``depends_on`` names a failed stage.
    """

    def __init__(self, registry: ComponentRegistry, config: PipelineConfig) -> None:
        self._registry = registry
        self._config = config

    @property
    def config(self) -> PipelineConfig:
        return self._config

    @property
    def registry(self) -> ComponentRegistry:
        return self._registry

    def run(self, context: PipelineContext) -> PipelineResult:
        cfg = self._config
        failed: set[str] = set()
        for name in cfg.stages:
            if name in cfg.skip_stages:
                context.update(_skipped(name, "in skip_stages"))
                continue
            try:
                stage = self._registry.get_stage(name)
            except Exception as e:
                if cfg.stop_on_failure:
                    raise PipelineError(f"Failed to get stage {name}: {e}") from e
                context.update(_errored(name, e))
                failed.add(name)
                continue

            blocked = sorted(failed.intersection(stage.depends_on))
            if blocked:
                context.update(_skipped(name, f"dependency failed: {', '.join(blocked)}"))
                continue
            if stage.can_skip(context):
                context.update(_skipped(name, "can_skip=True"))
                continue

            log.debug("running stage %s", name)
            try:
                result = stage.execute(context)
            except Exception as e:
                if cfg.stop_on_failure:
                    raise PipelineError(f"Stage {name} failed: {e}") from e
                result = _errored(name, e)

            context.update(result)
            if not result.success:
                failed.add(name)
                if cfg.stop_on_failure:
                    break

        return context.finalize()
