"""Info stage: dimensions of the algebra and a summary of every named state."""

from __future__ import annotations

import logging
from typing import Any

from nclebesgue.core.schema import PipelineContext, StageResult
from nclebesgue.operators.algebra import center, commutant
from nclebesgue.operators.functional import PLF, is_positive, isotropic_ideal
from nclebesgue.utils import density_report, get_instance

log = logging.getLogger(__name__)


def _state_summary(plf: PLF, context: PipelineContext) -> dict[str, Any]:
    summary = density_report(plf)
    positive = is_positive(plf, context.tolerance)
    summary["positive"] = positive
    if positive:
        rank = isotropic_ideal(plf, context.tolerance).rank
        summary["isotropic_rank"] = rank
        summary["faithful"] = rank == 0
    return summary


class InfoStage:
    """Pipeline stage reporting algebra, commutant and center dimensions plus per-state data."""

    name = "info"
    depends_on: list[str] = []

    def execute(self, context: PipelineContext) -> StageResult:
        inst, failure = get_instance(context, self.name)
        if failure is not None:
            return failure
        alg = inst.algebra
        comm = commutant(alg)
        cent = center(alg)
        states = {name: _state_summary(plf, context) for name, plf in sorted(inst.states.items())}
        log.info(
            "info: n=%d d=%d commutant=%d center=%d states=%d",
            alg.ambient_dim, alg.dim, comm.dim, cent.dim, len(states),
        )
        section = {
            "ambient_dim": alg.ambient_dim,
            "algebra_dim": alg.dim,
            "commutant_dim": comm.dim,
            "center_dim": cent.dim,
            "kind": inst.spec.kind,
            "has_dynamics": inst.dynamics is not None,
            "states": states,
        }
        return StageResult(
            stage_name=self.name,
            message=f"algebra of dimension {alg.dim} in M_{alg.ambient_dim}",
            data={"section": section},
        )

    def can_skip(self, context: PipelineContext) -> bool:
        return False
