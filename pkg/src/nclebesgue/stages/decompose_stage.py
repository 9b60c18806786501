"""Decompose stage: Lebesgue decomposition of mu with respect to lambda."""

from __future__ import annotations

import logging

from nclebesgue.core.schema import PipelineContext, StageResult
from nclebesgue.decomposition.lebesgue import decompose, is_absolutely_continuous, is_singular
from nclebesgue.linalg.numerics import op_norm, parallel_sum
from nclebesgue.utils import check, density_report, get_instance, get_pair

log = logging.getLogger(__name__)

#: Multiple of ``eq_abs * scale`` allowed for the integrity checks of this stage.
INTEGRITY_FACTOR = 100

KMS_CAVEAT = "lambda is KMS for the instance dynamics; the decomposition is the weak* one"
NOT_KMS_CAVEAT = (
    "lambda fails the KMS check for the instance dynamics; "
    "the decomposition holds in the GK sense only"
)


class DecomposeStage:
    """Pipeline stage splitting ``mu`` into ``mu_ac + mu_s`` relative to ``lambda``.

    The AC/singular verdicts are informational. The checks are integrity checks on the parts:
    they add up to ``mu``, the shorted form is representable, ``mu_s`` is singular and ``mu_ac``
    is absolutely continuous.
    """

    name = "decompose"
    depends_on: list[str] = ["info"]

    def execute(self, context: PipelineContext) -> StageResult:
        inst, failure = get_instance(context, self.name)
        if failure is not None:
            return failure
        mu, lam, failure = get_pair(context, self.name)
        if failure is not None:
            return failure
        tol = context.tolerance

        result = decompose(mu, lam, tol, dynamics=inst.dynamics)
        diag = result.diagnostics
        scale = max(op_norm(mu.gram), op_norm(lam.gram))
        bound = INTEGRITY_FACTOR * tol.eq_abs * scale

        additivity = (result.mu_ac + result.mu_s).distance(mu)
        s_norm = op_norm(parallel_sum(result.mu_s.gram, lam.gram, tol))
        ac_part = is_absolutely_continuous(result.mu_ac, lam, tol)
        checks = [
            check("exact_additivity", additivity <= bound, additivity),
            check("short_representable", diag.short_residual <= bound, diag.short_residual),
            check("parts_singular", is_singular(result.mu_s, lam, tol), s_norm),
            check("parts_absolutely_continuous", ac_part.is_ac, ac_part.bound),
        ]

        ac = is_absolutely_continuous(mu, lam, tol)
        section = {
            "mu": context.mu_name,
            "lambda": context.lambda_name,
            "label": result.label,
            "mu_ac": density_report(result.mu_ac),
            "mu_s": density_report(result.mu_s),
            "diagnostics": {
                "kernel_inclusion": diag.kernel_inclusion,
                "parallel_sum_norm": diag.parallel_sum_norm,
                "short_residual": diag.short_residual,
            },
            "verdicts": {
                "absolutely_continuous": ac.is_ac,
                "domination_bound": ac.bound,
                "singular": is_singular(mu, lam, tol),
            },
        }
        if diag.kms_residual is not None:
            section["diagnostics"]["kms_residual"] = diag.kms_residual
            section["caveat"] = KMS_CAVEAT if result.label == "weak*" else NOT_KMS_CAVEAT

        log.info(
            "decompose %s against %s: |mu_ac|=%.6g |mu_s|=%.6g (%s)",
            context.mu_name, context.lambda_name, result.mu_ac.norm, result.mu_s.norm, result.label,
        )
        return StageResult(
            stage_name=self.name,
            message=f"{result.label} decomposition",
            data={"section": section, "checks": checks},
        )

    def can_skip(self, context: PipelineContext) -> bool:
        return False
