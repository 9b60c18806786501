"""Pydantic models passed between stages, reporters and the CLI."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field

from nclebesgue.linalg.numerics import DEFAULT_TOLERANCE, Tolerance

Verdict = Literal["pass", "fail", "skipped"]


class CheckResult(BaseModel):
    """One named check with its residual."""

    name: str
    passed: bool
    residual: float | None = None
    detail: str = ""


class StageResult(BaseModel):
    """Result produced by a pipeline stage.

    ``data["section"]`` is merged into the report under the stage name and ``data["checks"]``
    (a list of CheckResult) is appended to the report checks.
    """

    stage_name: str
    success: bool = True
    verdict: Verdict = "pass"
    message: str = ""
    data: dict[str, Any] = Field(default_factory=dict)


class Report(BaseModel):
    """What a command prints: echo of the command, per-stage sections, checks and a summary."""

    command: str
    sections: dict[str, Any] = Field(default_factory=dict)
    checks: list[CheckResult] = Field(default_factory=list)
    summary: dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.summary.get("passed", all(c.passed for c in self.checks)))


class PipelineContext(BaseModel):
    """Mutable context passed between pipeline stages."""

    model_config = {"arbitrary_types_allowed": True}

    instance: Any = None
    instance_name: str = ""
    mu_name: str | None = None
    lambda_name: str | None = None
    tolerance: Tolerance = DEFAULT_TOLERANCE
    stage_results: list[StageResult] = Field(default_factory=list)
    sections: dict[str, Any] = Field(default_factory=dict)
    checks: list[CheckResult] = Field(default_factory=list)
    config: dict[str, Any] = Field(default_factory=dict)

    def update(self, result: StageResult) -> None:
        """Append a stage result and merge its data into context."""
        self.stage_results.append(result)
        if result.data:
            if "section" in result.data:
                self.sections[result.stage_name] = result.data["section"]
            if "checks" in result.data:
                self.checks.extend(result.data["checks"])

    def finalize(self) -> PipelineResult:
        """Build final pipeline result from context."""
        return PipelineResult(
            success=all(r.success for r in self.stage_results),
            negative=any(r.verdict == "fail" for r in self.stage_results),
            stage_results=self.stage_results,
            sections=self.sections,
            checks=self.checks,
        )


class PipelineResult(BaseModel):
    """Final result of a pipeline run."""

    success: bool = True
    negative: bool = False
    stage_results: list[StageResult] = Field(default_factory=list)
    sections: dict[str, Any] = Field(default_factory=dict)
    checks: list[CheckResult] = Field(default_factory=list)

    @property
    def exit_code(self) -> int:
        """0 when everything passed.

        2 when a stage could not run, 1 for a negative verdict, 3 when a check failed without a
        negative verdict to explain it.
        """
        if not self.success:
            return 2
        if self.negative:
            return 1
        if not all(c.passed for c in self.checks):
            return 3
        return 0

    def to_report(self, command: str) -> Report:
        return Report(
            command=command,
            sections=self.sections,
            checks=self.checks,
            summary={
                "exit_code": self.exit_code,
                "passed": self.exit_code == 0,
                "stages": {r.stage_name: r.verdict for r in self.stage_results},
            },
        )
