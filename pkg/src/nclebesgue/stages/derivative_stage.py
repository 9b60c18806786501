"""Derivative stage: Radon-Nikodym derivative of mu with respect to lambda."""

from __future__ import annotations

import logging
from typing import Any

import numpy as np

from nclebesgue.core.exceptions import NotDominated, NotTracial
from nclebesgue.core.schema import PipelineContext, StageResult
from nclebesgue.decomposition.lebesgue import is_absolutely_continuous, witness_sequence
from nclebesgue.decomposition.radon_nikodym import (
    Derivative,
    bounded_domination_check,
    derivative,
    reconstruct,
    resolvent_distance,
    tracial_density,
)
from nclebesgue.linalg.numerics import Tolerance
from nclebesgue.operators.functional import PLF
from nclebesgue.utils import check, get_pair

log = logging.getLogger(__name__)

#: Multiple of ``eq_abs * scale`` allowed for reconstruction and commutation residuals.
RESIDUAL_FACTOR = 10

#: Default number of terms in the reported witness sequence.
DEFAULT_WITNESS_TERMS = 8


def _witness_report(
    deriv: Derivative, mu: PLF, lam: PLF, n_terms: int, tol: Tolerance
) -> tuple[list[dict[str, Any]], bool, float]:
    """Witness terms with their bounds and resolvent distances to the full derivative.

    Returns the terms, whether the distances are non-increasing, and the final distance.
    """
    terms = []
    distances = []
    for term in witness_sequence(mu, lam, n_terms, tol):
        d_k = derivative(term.plf, lam, deriv.gns, tol)
        dist = resolvent_distance(d_k, deriv)
        distances.append(dist)
        terms.append({"bound": term.bound, "norm": term.plf.norm, "resolvent_distance": dist})
    slack = RESIDUAL_FACTOR * tol.eq_abs
    monotone = all(b <= a + slack for a, b in zip(distances, distances[1:]))
    return terms, monotone, distances[-1] if distances else 0.0


class DerivativeStage:
    """Pipeline stage computing ``D`` with ``mu(a) = <pi(a) sqrt(D) xi, sqrt(D) xi>``.

    A pair that is not absolutely continuous gives a failed verdict, not an error.
    """

    name = "derivative"
    depends_on: list[str] = ["info"]

    def execute(self, context: PipelineContext) -> StageResult:
        mu, lam, failure = get_pair(context, self.name)
        if failure is not None:
            return failure
        tol = context.tolerance

        ac = is_absolutely_continuous(mu, lam, tol)
        if not ac:
            log.info("derivative: %s is not absolutely continuous w.r.t. %s", context.mu_name, context.lambda_name)
            return StageResult(
                stage_name=self.name,
                verdict="fail",
                message="mu is not absolutely continuous with respect to lambda",
                data={
                    "section": {
                        "mu": context.mu_name,
                        "lambda": context.lambda_name,
                        "absolutely_continuous": False,
                    },
                    "checks": [check("absolutely_continuous", False)],
                },
            )

        deriv = derivative(mu, lam, tol=tol)
        scale = float(np.max(np.abs(mu.values)))
        recon = reconstruct(deriv).distance(mu)
        commutation = deriv.affiliation_residual
        try:
            dominated = bounded_domination_check(deriv, mu, lam, ac.bound, tol)
        except NotDominated as e:
            log.warning("bounded domination: %s", e)
            dominated = False

        n_terms = int(context.config.get("witness_terms", DEFAULT_WITNESS_TERMS))
        witness, monotone, final = _witness_report(deriv, mu, lam, n_terms, tol)

        checks = [
            check("absolutely_continuous", True, ac.bound),
            check("reconstruction", recon <= RESIDUAL_FACTOR * tol.eq_abs * scale, recon),
            check(
                "commutation",
                commutation <= RESIDUAL_FACTOR * tol.eq_abs * deriv.norm_bound,
                commutation,
            ),
            check("bounded_domination", dominated, deriv.norm_bound - ac.bound),
            check("resolvent_chain", monotone and final <= RESIDUAL_FACTOR * tol.eq_abs, final),
        ]
        section: dict[str, Any] = {
            "mu": context.mu_name,
            "lambda": context.lambda_name,
            "absolutely_continuous": True,
            "domain": "automatic",
            "gns_dim": deriv.gns.gns_dim,
            "commutant_dim": deriv.commutant.dim if deriv.commutant is not None else 0,
            "spectrum": deriv.spectrum,
            "norm_bound": deriv.norm_bound,
            "domination_bound": ac.bound,
            "solve_residual": deriv.solve_residual,
            "reconstruction_residual": recon,
            "commutation_residual": commutation,
            "witness": witness,
        }
        try:
            section["tracial_density"] = tracial_density(mu, lam, tol)
        except NotTracial:
            pass

        log.info("derivative: spectrum %s", deriv.spectrum)
        return StageResult(
            stage_name=self.name,
            message=f"derivative on L2 of dimension {deriv.gns.gns_dim}",
            data={"section": section, "checks": checks},
        )

    def can_skip(self, context: PipelineContext) -> bool:
        return False
