"""Self tests of the numerical kernels on tiny cases with known answers."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from nclebesgue.core.config import ConfigManager
from nclebesgue.core.registry import ComponentRegistry
from nclebesgue.dynamics.kms import gibbs, kms_residual, make_dynamics
from nclebesgue.linalg.numerics import Tolerance, hermitian_eig, pseudo_inverse, shorted_operator
from nclebesgue.operators.algebra import generate

log = logging.getLogger(__name__)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

LINALG_SUGGESTION = "Check the numpy/scipy installation (LAPACK backend) and the tolerance settings."


@dataclass
class HealthCheckResult:
    """Result of a single health check."""

    name: str
    ok: bool
    message: str = ""
    suggestion: str = ""


def _residual_check(
    name: str, compute: Callable[[], float], bound: float, suggestion: str = LINALG_SUGGESTION
) -> HealthCheckResult:
    try:
        residual = compute()
    except Exception as e:
        return HealthCheckResult(name=name, ok=False, message=str(e), suggestion=suggestion)
    if residual <= bound:
        return HealthCheckResult(name=name, ok=True, message=f"residual {residual:.2e}")
    return HealthCheckResult(
        name=name,
        ok=False,
        message=f"residual {residual:.2e} exceeds {bound:.0e}",
        suggestion=suggestion,
    )


class HealthChecker:
    """Run kernel self tests plus configuration and registry checks."""

    def __init__(
        self,
        config: ConfigManager | None = None,
        registry: ComponentRegistry | None = None,
    ) -> None:
        self._config = config or ConfigManager()
        self._registry = registry or ComponentRegistry()

    @property
    def tolerance(self) -> Tolerance:
        return self._config.config.tolerance.to_tolerance()

    def check_eigensolver(self) -> HealthCheckResult:
        """Pauli X has eigenvalues 1 and -1."""

        def compute() -> float:
            evals, u = hermitian_eig(PAULI_X, self.tolerance)
            recon = (u * evals) @ u.conj().T
            return max(float(np.max(np.abs(evals - [1.0, -1.0]))), float(np.max(np.abs(recon - PAULI_X))))

        return _residual_check("eigensolver", compute, 1e-12)

    def check_pseudo_inverse(self) -> HealthCheckResult:
        """``(v v*)^+ = v v* / |v|^4``."""

        def compute() -> float:
            v = np.array([[1.0], [2.0j]])
            m = v @ v.conj().T
            expected = m / 25.0
            return float(np.max(np.abs(pseudo_inverse(m, self.tolerance) - expected)))

        return _residual_check("pseudo_inverse", compute, 1e-12)

    def check_schur_short(self) -> HealthCheckResult:
        """Shorting ``[[2, 1], [1, 1]]`` onto the first axis leaves the Schur complement 1."""

        def compute() -> float:
            g = np.array([[2.0, 1.0], [1.0, 1.0]], dtype=complex)
            s = np.array([[1.0], [0.0]], dtype=complex)
            expected = np.array([[1.0, 0.0], [0.0, 0.0]])
            return float(np.max(np.abs(shorted_operator(g, s, self.tolerance) - expected)))

        return _residual_check("schur_short", compute, 1e-12)

    def check_closure(self) -> HealthCheckResult:
        """Pauli X and Z generate all of M_2."""

        def compute() -> float:
            return float(abs(generate([PAULI_X, PAULI_Z], 2, self.tolerance).dim - 4))

        return _residual_check("m2_closure", compute, 0.0)

    def check_gibbs_kms(self) -> HealthCheckResult:
        """The Gibbs state of Pauli Z at beta = 1 satisfies the KMS condition."""

        def compute() -> float:
            tol = self.tolerance
            alg = generate([PAULI_X, PAULI_Z], 2, tol)
            return kms_residual(gibbs(alg, PAULI_Z, 1.0), make_dynamics(alg, PAULI_Z, 1.0))

        return _residual_check("gibbs_kms", compute, 1e-10)

    def check_registry(self) -> HealthCheckResult:
        """Stages and reporters are registered."""
        avail = self._registry.list_available()
        missing = [k for k in ("stages", "reporters") if not avail.get(k)]
        if missing:
            return HealthCheckResult(
                name="registry",
                ok=False,
                message=f"nothing registered for: {', '.join(missing)}",
                suggestion="Call register_builtin_stages and register_builtin_reporters before running checks.",
            )
        summary = ", ".join(f"{k}: {len(v)}" for k, v in sorted(avail.items()))
        return HealthCheckResult(name="registry", ok=True, message=summary)

    def check_all(self, *, skip_registry: bool = False) -> list[HealthCheckResult]:
        """Run all enabled checks."""
        results = [
            self.check_eigensolver(),
            self.check_pseudo_inverse(),
            self.check_schur_short(),
            self.check_closure(),
            self.check_gibbs_kms(),
        ]
        if not skip_registry:
            results.append(self.check_registry())
        for r in results:
            log.debug("health %s: %s %s", r.name, "OK" if r.ok else "FAIL", r.message)
        return results
