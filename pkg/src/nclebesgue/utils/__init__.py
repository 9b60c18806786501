"""Shared utilities for pipeline stages and the CLI."""

from __future__ import annotations

import logging
from typing import Any

import numpy as np

from nclebesgue.core.config import AppConfig
from nclebesgue.core.instance import InstanceFile, LoadedInstance, instance_tolerance
from nclebesgue.core.schema import CheckResult, PipelineContext, StageResult
from nclebesgue.linalg.numerics import Tolerance, dagger
from nclebesgue.operators.functional import PLF

log = logging.getLogger(__name__)


def get_instance(
    context: PipelineContext,
    stage_name: str,
) -> tuple[LoadedInstance | None, StageResult | None]:
    """Extract the loaded instance from pipeline context.

    Returns:
        (instance, None) on success.
        (None, StageResult) on failure; caller should return the StageResult.
    """
    inst = context.instance
    if not isinstance(inst, LoadedInstance):
        return None, StageResult(
            stage_name=stage_name,
            success=False,
            verdict="fail",
            message="no instance loaded in context",
        )
    return inst, None


def get_pair(
    context: PipelineContext,
    stage_name: str,
) -> tuple[PLF | None, PLF | None, StageResult | None]:
    """Resolve ``mu`` and ``lambda`` from the names stored on the context.

    Raises:
        UnknownState: if a name is not in the instance.
    """
    inst, failure = get_instance(context, stage_name)
    if failure is not None:
        return None, None, failure
    if context.mu_name is None or context.lambda_name is None:
        return None, None, StageResult(
            stage_name=stage_name,
            success=False,
            verdict="fail",
            message="stage needs both --mu and --lambda",
        )
    return inst.state(context.mu_name), inst.state(context.lambda_name), None


def density_report(plf: PLF) -> dict[str, Any]:
    """Basis-independent view of a functional: its density in the algebra, norm and spectrum."""
    rho = plf.density
    rho = (rho + dagger(rho)) / 2
    spectrum = np.sort(np.linalg.eigvalsh(rho))[::-1]
    return {
        "density": rho,
        "norm": float(np.real(plf.norm)),
        "spectrum": spectrum,
    }


def check(name: str, passed: bool, residual: float | None = None, detail: str = "") -> CheckResult:
    return CheckResult(
        name=name,
        passed=bool(passed),
        residual=None if residual is None else float(residual),
        detail=detail,
    )


def resolve_tolerance(
    config: AppConfig,
    instance: InstanceFile | None = None,
    *,
    rank_rel: float | None = None,
    eq_abs: float | None = None,
    psd_slack: float | None = None,
) -> Tolerance:
    """Configured tolerance, then instance overrides, then explicit (CLI) overrides."""
    tol = config.tolerance.to_tolerance()
    if instance is not None:
        tol = instance_tolerance(instance, tol)
    overrides = {
        key: value
        for key, value in (("rank_rel", rank_rel), ("eq_abs", eq_abs), ("psd_slack", psd_slack))
        if value is not None
    }
    if overrides:
        tol = Tolerance.model_validate({**tol.model_dump(), **overrides})
    log.debug("tolerance: %s", tol.model_dump())
    return tol
