"""Protocol interfaces for pluggable components."""

from nclebesgue.protocols.pipeline_stage import PipelineStage
from nclebesgue.protocols.reporter import Reporter

__all__ = [
    "PipelineStage",
    "Reporter",
]
