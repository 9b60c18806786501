"""Tests for PipelineEngine and PipelineConfig."""

from __future__ import annotations

import pytest

from nclebesgue.core.exceptions import PipelineError, UnknownState
from nclebesgue.core.pipeline import PipelineConfig, PipelineEngine
from nclebesgue.core.registry import ComponentRegistry
from nclebesgue.core.schema import PipelineContext, StageResult
from nclebesgue.protocols import PipelineStage
from nclebesgue.utils import check

from _helpers import make_pipeline_context


class _SuccessStage(PipelineStage):
    name = "success_stage"
    depends_on: list[str] = []

    def execute(self, context: PipelineContext) -> StageResult:
        return StageResult(
            stage_name=self.name,
            data={"section": {"value": 1}, "checks": [check("ok", True, 0.0)]},
        )

    def can_skip(self, context: PipelineContext) -> bool:
        return False


class _FailStage(PipelineStage):
    name = "fail_stage"
    depends_on: list[str] = []

    def execute(self, context: PipelineContext) -> StageResult:
        return StageResult(stage_name=self.name, success=False, verdict="fail", message="failed")

    def can_skip(self, context: PipelineContext) -> bool:
        return False


class _NegativeStage(PipelineStage):
    name = "negative_stage"
    depends_on: list[str] = []

    def execute(self, context: PipelineContext) -> StageResult:
        return StageResult(stage_name=self.name, verdict="fail", message="not absolutely continuous")

    def can_skip(self, context: PipelineContext) -> bool:
        return False


class _SkippableStage(PipelineStage):
    name = "skippable_stage"
    depends_on: list[str] = []

    def execute(self, context: PipelineContext) -> StageResult:
        raise AssertionError("execute must not run")

    def can_skip(self, context: PipelineContext) -> bool:
        return True


class _DependentStage(PipelineStage):
    name = "dependent_stage"
    depends_on: list[str] = ["raise"]

    def execute(self, context: PipelineContext) -> StageResult:
        return StageResult(stage_name=self.name)

    def can_skip(self, context: PipelineContext) -> bool:
        return False


class _RaiseStage(PipelineStage):
    name = "raise_stage"
    depends_on: list[str] = []

    def execute(self, context: PipelineContext) -> StageResult:
        raise UnknownState("no state named 'nope'")

    def can_skip(self, context: PipelineContext) -> bool:
        return False


def _engine(stages: list[str], skip: list[str] | None = None, stop: bool = True) -> PipelineEngine:
    reg = ComponentRegistry()
    reg.register_stage("success", _SuccessStage)
    reg.register_stage("fail", _FailStage)
    reg.register_stage("negative", _NegativeStage)
    reg.register_stage("skippable", _SkippableStage)
    reg.register_stage("raise", _RaiseStage)
    reg.register_stage("dependent", _DependentStage)
    return PipelineEngine(reg, PipelineConfig(stages=stages, skip_stages=skip or [], stop_on_failure=stop))


def test_pipeline_empty_stages() -> None:
    result = _engine([]).run(PipelineContext())
    assert result.success is True
    assert result.stage_results == []
    assert result.exit_code == 0


def test_pipeline_run_one_stage() -> None:
    result = _engine(["success"]).run(PipelineContext())
    assert result.success is True
    assert result.stage_results[0].stage_name == "success_stage"
    assert result.sections == {"success_stage": {"value": 1}}
    assert [c.name for c in result.checks] == ["ok"]


def test_pipeline_skip_stages() -> None:
    result = _engine(["success"], skip=["success"]).run(PipelineContext())
    assert result.success is True
    assert len(result.stage_results) == 1
    assert result.stage_results[0].verdict == "skipped"
    assert "skip_stages" in result.stage_results[0].message


def test_pipeline_can_skip_does_not_execute() -> None:
    result = _engine(["skippable", "success"]).run(PipelineContext())
    assert [r.verdict for r in result.stage_results] == ["skipped", "pass"]
    assert "can_skip" in result.stage_results[0].message


def test_pipeline_negative_verdict_does_not_stop() -> None:
    result = _engine(["negative", "success"]).run(PipelineContext())
    assert len(result.stage_results) == 2
    assert result.success is True
    assert result.exit_code == 1


def test_pipeline_stage_failure_stops() -> None:
    result = _engine(["fail", "success"]).run(PipelineContext())
    assert len(result.stage_results) == 1
    assert result.exit_code == 2


def test_pipeline_stop_on_failure_raises_for_unknown_stage() -> None:
    with pytest.raises(PipelineError, match="Failed to get stage"):
        _engine(["nonexistent"]).run(PipelineContext())


def test_pipeline_stop_on_failure_keeps_cause() -> None:
    with pytest.raises(PipelineError, match="Stage raise failed") as exc_info:
        _engine(["raise"]).run(PipelineContext())
    assert isinstance(exc_info.value.__cause__, UnknownState)


def test_pipeline_no_stop_on_failure_continues() -> None:
    result = _engine(["nonexistent", "raise", "success"], stop=False).run(PipelineContext())
    assert [r.success for r in result.stage_results] == [False, False, True]
    assert "nope" in result.stage_results[1].message
    assert result.exit_code == 2


def test_pipeline_skips_stage_whose_dependency_failed() -> None:
    result = _engine(["raise", "dependent", "success"], stop=False).run(PipelineContext())
    assert [r.verdict for r in result.stage_results] == ["fail", "skipped", "pass"]
    assert "dependency failed: raise" in result.stage_results[1].message


def test_pipeline_dependency_not_requested_does_not_block() -> None:
    result = _engine(["dependent"]).run(PipelineContext())
    assert result.stage_results[0].verdict == "pass"


# ---------------------------------------------------------------------------
# Built-in stages
# ---------------------------------------------------------------------------


def test_builtin_pipeline_on_m2(registry, m2_instance) -> None:
    engine = PipelineEngine(registry, PipelineConfig(stages=["info", "decompose", "derivative", "kms"]))
    result = engine.run(make_pipeline_context(m2_instance, config={"witness_terms": 3}))
    assert result.exit_code == 0
    assert sorted(result.sections) == ["decompose", "derivative", "info", "kms"]


def test_builtin_pipeline_skips_kms_without_dynamics(registry, classical_instance) -> None:
    engine = PipelineEngine(registry, PipelineConfig(stages=["info", "decompose", "kms"]))
    result = engine.run(make_pipeline_context(classical_instance))
    assert [r.verdict for r in result.stage_results] == ["pass", "pass", "skipped"]
    assert result.exit_code == 0
