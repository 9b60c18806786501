"""Built-in pipeline stages."""

from nclebesgue.stages.decompose_stage import DecomposeStage
from nclebesgue.stages.derivative_stage import DerivativeStage
from nclebesgue.stages.info_stage import InfoStage
from nclebesgue.stages.kms_stage import KmsStage


def register_builtin_stages(registry) -> None:
    """Register built-in pipeline stages on the given registry."""
    registry.register_stage("info", InfoStage)
    registry.register_stage("decompose", DecomposeStage)
    registry.register_stage("derivative", DerivativeStage)
    registry.register_stage("kms", KmsStage)


__all__ = [
    "DecomposeStage",
    "DerivativeStage",
    "InfoStage",
    "KmsStage",
    "register_builtin_stages",
]
