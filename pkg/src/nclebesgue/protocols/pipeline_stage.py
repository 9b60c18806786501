"""Protocol for analysis stages."""

from __future__ import annotations

from typing import Protocol

from nclebesgue.core.schema import PipelineContext, StageResult


class PipelineStage(Protocol):
    """One analysis step over a loaded instance and a chosen (mu, lambda) pair.

    ``depends_on`` names stages whose failure in the same run makes this one meaningless; the
    engine skips it instead of executing it. A dependency that was not requested, or was skipped,
    does not block.

    ``execute`` reports a negative mathematical answer as ``verdict="fail"`` with
    ``success=True``. ``success=False`` means the stage could not produce an answer.
    """

    name: str
    depends_on: list[str]

    def execute(self, context: PipelineContext) -> StageResult: ...

    def can_skip(self, context: PipelineContext) -> bool:
        """True when the instance lacks what the stage needs (e.g. dynamics for ``kms``)."""
        ...
