"""KMS stage: does lambda satisfy the KMS condition for the instance dynamics?"""

from __future__ import annotations

import logging

import numpy as np

from nclebesgue.core.schema import PipelineContext, StageResult
from nclebesgue.dynamics.kms import gibbs_distance, kms_residual, time_invariance_residual
from nclebesgue.operators.functional import PLF
from nclebesgue.utils import check, get_instance

log = logging.getLogger(__name__)

#: Multiple of ``eq_abs * |lambda(1)|`` allowed for time invariance.
INVARIANCE_FACTOR = 10


def trace_residual(lam: PLF) -> float:
    """``max_{i,j} |lambda(b_i b_j) - lambda(b_j b_i)|``; zero iff lambda is tracial."""
    g = lam.gram
    # basis is Hermitian, so G[i, j] = lambda(b_i b_j) and G[j, i] = lambda(b_j b_i)
    return float(np.max(np.abs(g - g.T))) if g.size else 0.0


class KmsStage:
    """Pipeline stage checking the KMS condition, time invariance and the Gibbs comparison.

    Skipped when the instance has no dynamics.
    """

    name = "kms"
    depends_on: list[str] = ["info"]

    def execute(self, context: PipelineContext) -> StageResult:
        inst, failure = get_instance(context, self.name)
        if failure is not None:
            return failure
        if context.lambda_name is None:
            return StageResult(
                stage_name=self.name,
                success=False,
                verdict="fail",
                message="stage needs --lambda",
            )
        lam = inst.state(context.lambda_name)
        dyn = inst.require_dynamics()
        tol = context.tolerance
        scale = max(abs(lam.norm), tol.eq_abs)

        residual = kms_residual(lam, dyn)
        passed = residual <= tol.eq_abs * scale
        invariance = time_invariance_residual(lam, dyn)
        distance = gibbs_distance(lam, dyn)
        checks = [
            check("kms", passed, residual),
            check("time_invariance", invariance <= INVARIANCE_FACTOR * tol.eq_abs * scale, invariance),
        ]
        section = {
            "lambda": context.lambda_name,
            "beta": dyn.beta,
            "is_kms": passed,
            "kms_residual": residual,
            "time_invariance_residual": invariance,
            "gibbs_distance": distance,
        }
        if dyn.beta == 0:
            tr = trace_residual(lam)
            section["trace_residual"] = tr
            checks.append(check("tracial", tr <= tol.eq_abs * scale, tr))

        log.info("kms: beta=%g residual=%.3e gibbs distance=%.3e", dyn.beta, residual, distance)
        return StageResult(
            stage_name=self.name,
            verdict="pass" if passed else "fail",
            message="lambda is KMS" if passed else "lambda is not KMS",
            data={"section": section, "checks": checks},
        )

    def can_skip(self, context: PipelineContext) -> bool:
        inst = context.instance
        return inst is not None and inst.dynamics is None
