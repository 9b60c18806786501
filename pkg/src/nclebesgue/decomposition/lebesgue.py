"""Lebesgue decomposition of a positive functional relative to another.

The absolutely continuous part comes from the Gram form of mu shorted onto the range of the Gram
form of lambda, read back as a functional by evaluating the form against the unit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg as sla

from nclebesgue.core.exceptions import NotAbsolutelyContinuous, RepresentabilityBreach
from nclebesgue.decomposition.radon_nikodym import derivative
from nclebesgue.dynamics.kms import Dynamics, kms_residual
from nclebesgue.linalg.numerics import (
    Tolerance,
    dagger,
    op_norm,
    parallel_sum,
    psd_check,
    range_basis,
    shorted_operator,
    spectral_split,
)
from nclebesgue.operators.functional import PLF, ideal_contained, leq, require_positive
from nclebesgue.operators.gns import gns, normal_decomposition_basis, transfer

log = logging.getLogger(__name__)

Label = Literal["weak*", "GK"]


@dataclass(frozen=True)
class DecompositionDiagnostics:
    kernel_inclusion: bool
    parallel_sum_norm: float
    short_residual: float
    kms_residual: float | None = None


@dataclass(frozen=True, eq=False)
class Decomposition:
    """``mu = mu_ac + mu_s`` relative to ``lam``."""

    mu: PLF
    lam: PLF
    mu_ac: PLF
    mu_s: PLF
    diagnostics: DecompositionDiagnostics
    label: Label = "GK"


@dataclass(frozen=True)
class AcReport:
    """Outcome of :func:`is_absolutely_continuous`; ``bound`` is the smallest t with mu <= t lambda."""

    is_ac: bool
    bound: float | None = None

    def __bool__(self) -> bool:
        return self.is_ac


@dataclass(frozen=True)
class WitnessTerm:
    plf: PLF
    bound: float


@dataclass(frozen=True)
class SuiteCheck:
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass
class SuiteReport:
    checks: list[SuiteCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, residual: float, detail: str = "") -> None:
        self.checks.append(SuiteCheck(name, bool(passed), float(residual), detail))


def _scale(*plfs: PLF) -> float:
    return max((op_norm(p.gram) for p in plfs), default=0.0)


def _split(mu: PLF, mu_ac: PLF, tol: Tolerance) -> tuple[PLF, PLF]:
    """``(mu_ac, mu - mu_ac)``, with a part whose form is round-off next to ``G_mu`` set to zero."""
    floor = tol.rank_rel * op_norm(mu.gram)
    zero = PLF(mu.algebra, np.zeros_like(mu.values))
    if op_norm(mu_ac.gram) <= floor:
        return zero, mu
    mu_s = mu - mu_ac
    if op_norm(mu_s.gram) <= floor:
        return mu, zero
    return mu_ac, mu_s


# ---------------------------------------------------------------------------
# Decomposition
# ---------------------------------------------------------------------------


def decompose(
    mu: PLF, lam: PLF, tol: Tolerance | None = None, dynamics: Dynamics | None = None
) -> Decomposition:
    """Split ``mu`` into parts absolutely continuous and singular with respect to ``lam``.

    The result is labelled ``"weak*"`` only when ``dynamics`` is given and ``lam`` passes the KMS
    check for it; otherwise ``"GK"``. A part whose Gram norm is below ``rank_rel * ||G_mu||`` is
    returned as exactly zero, so the other part is ``mu`` itself.

    Raises:
        NotPositive: if either functional is not positive.
        RepresentabilityBreach: if the shorted form is not the Gram form of a functional.
    """
    tol = tol or lam.algebra.tol
    require_positive(mu, tol, "mu")
    require_positive(lam, tol, "lambda")
    alg = mu.algebra

    g_ac = shorted_operator(mu.gram, range_basis(lam.gram, tol), tol)
    # mu_ac(a) = form(1, a)
    mu_ac = PLF(alg, np.conj(alg.unit_coords) @ g_ac)
    short_residual = float(np.max(np.abs(mu_ac.gram - g_ac))) if g_ac.size else 0.0
    if short_residual > 100 * tol.eq_abs * _scale(mu):
        raise RepresentabilityBreach(f"shorted form is not a Gram form (residual {short_residual:.3e})")
    mu_ac, mu_s = _split(mu, mu_ac, tol)

    kms = None
    label: Label = "GK"
    if dynamics is not None:
        kms = kms_residual(lam, dynamics)
        if kms <= tol.eq_abs * max(abs(lam.norm), tol.eq_abs):
            label = "weak*"
    diagnostics = DecompositionDiagnostics(
        kernel_inclusion=ideal_contained(lam, mu, tol),
        parallel_sum_norm=op_norm(parallel_sum(mu.gram, lam.gram, tol)),
        short_residual=short_residual,
        kms_residual=kms,
    )
    log.debug(
        "decompose: |mu_ac|=%.6g |mu_s|=%.6g short residual %.3e",
        mu_ac.norm, mu_s.norm, short_residual,
    )
    return Decomposition(mu, lam, mu_ac, mu_s, diagnostics, label)


def is_absolutely_continuous(mu: PLF, lam: PLF, tol: Tolerance | None = None) -> AcReport:
    """Kernel inclusion, plus the uniform bound from the largest generalized eigenvalue of the
    Gram forms on the range of ``G_lambda``."""
    tol = tol or lam.algebra.tol
    if not ideal_contained(lam, mu, tol):
        return AcReport(False)
    _, rng, _ = spectral_split(lam.gram, tol)
    if rng.shape[1] == 0:
        return AcReport(True, 0.0)
    a = dagger(rng) @ mu.gram @ rng
    b = dagger(rng) @ lam.gram @ rng
    gen = sla.eigh((a + dagger(a)) / 2, (b + dagger(b)) / 2, eigvals_only=True)
    return AcReport(True, max(0.0, float(gen[-1])))


def is_singular(mu: PLF, lam: PLF, tol: Tolerance | None = None) -> bool:
    """True iff the parallel sum of the Gram forms vanishes."""
    tol = tol or lam.algebra.tol
    norm = op_norm(parallel_sum(mu.gram, lam.gram, tol))
    return norm <= tol.eq_abs * _scale(mu, lam)


# ---------------------------------------------------------------------------
# Witness sequences
# ---------------------------------------------------------------------------


def _spectral_levels(spectrum: np.ndarray, n_terms: int) -> np.ndarray:
    """``t_k = k ||D|| / n_terms`` for ``k = 1..n_terms``."""
    top = max(float(spectrum.max(initial=0.0)), 0.0)
    return top * np.arange(1, n_terms + 1) / n_terms


def witness_sequence(
    mu: PLF,
    lam: PLF,
    n_terms: int = 8,
    tol: Tolerance | None = None,
    method: Literal["spectral", "vectors"] = "spectral",
) -> list[WitnessTerm]:
    """Increasing functionals ``mu_k <= t_k lambda`` ending at ``mu``.

    ``spectral``: ``mu_k(a) = <pi(a) D E_k xi, xi>`` with ``E_k`` the spectral projection of the
    derivative ``D`` for ``[0, t_k]`` and ``t_k = k ||D|| / n_terms``. Terms below the smallest
    eigenvalue of ``D`` are zero.

    ``vectors``: partial sums ``sum_{j <= m_k} <pi(a) xi_j, xi_j>`` of a vector decomposition of the
    transferred ``mu``, each with its smallest admissible bound.

    Raises:
        NotAbsolutelyContinuous: if ``mu`` is not absolutely continuous with respect to ``lam``.
    """
    tol = tol or lam.algebra.tol
    if n_terms < 1:
        raise ValueError("n_terms must be positive")
    if not is_absolutely_continuous(mu, lam, tol):
        raise NotAbsolutelyContinuous("witness sequence requires mu << lambda")
    data = gns(lam.algebra, lam, tol)
    alg = lam.algebra
    if data.degenerate:
        return [WitnessTerm(mu, 0.0) for _ in range(n_terms)]
    xi = data.cyclic_vector

    if method == "spectral":
        deriv = derivative(mu, lam, data, tol)
        evals, u = np.linalg.eigh(deriv.operator)
        terms = []
        for level in _spectral_levels(evals, n_terms):
            keep = evals <= level * (1 + tol.rank_rel)
            cut = (u[:, keep] * evals[keep]) @ dagger(u[:, keep])
            values = np.einsum("a,iab,b->i", np.conj(xi), data.rep, cut @ xi)
            terms.append(WitnessTerm(PLF(alg, values), float(level)))
        return terms

    if method == "vectors":
        vectors = normal_decomposition_basis(data, transfer(data, mu, tol))
        terms = []
        m = len(vectors)
        for k in range(1, n_terms + 1):
            used = vectors[: int(np.ceil(k * m / n_terms))]
            values = np.zeros(alg.dim, dtype=complex)
            for v in used:
                values += np.einsum("a,iab,b->i", np.conj(v), data.rep, v)
            plf = PLF(alg, values)
            bound = is_absolutely_continuous(plf, lam, tol).bound or 0.0
            terms.append(WitnessTerm(plf, bound))
        return terms

    raise ValueError(f"unknown witness method: {method}")


# ---------------------------------------------------------------------------
# Property suite
# ---------------------------------------------------------------------------


def _gap(a: PLF, b: PLF) -> float:
    return a.distance(b)


def _order_violation(small: PLF, big: PLF, tol: Tolerance) -> float:
    """Magnitude of the most negative eigenvalue of ``G_big - G_small`` (0 when ordered)."""
    scale = max(op_norm(big.gram), op_norm(small.gram))
    report = psd_check(big.gram - small.gram, tol, scale)
    return 0.0 if report else max(0.0, -report.min_eigenvalue)


def property_suite(mu: PLF, tau: PLF, lam: PLF, tol: Tolerance | None = None) -> SuiteReport:
    """Additivity, monotonicity, heredity, idempotence and basis-uniqueness of the decomposition."""
    tol = tol or lam.algebra.tol
    report = SuiteReport()
    bound = 100 * tol.eq_abs * _scale(mu, tau, lam)

    dm = decompose(mu, lam, tol)
    dt = decompose(tau, lam, tol)
    dsum = decompose(mu + tau, lam, tol)
    add = max(_gap(dsum.mu_ac, dm.mu_ac + dt.mu_ac), _gap(dsum.mu_s, dm.mu_s + dt.mu_s))
    report.add("additivity", add <= bound, add)

    if leq(mu, tau, tol):
        viol = max(_order_violation(dm.mu_ac, dt.mu_ac, tol), _order_violation(dm.mu_s, dt.mu_s, tol))
        report.add(
            "monotonicity",
            leq(dm.mu_ac, dt.mu_ac, tol) and leq(dm.mu_s, dt.mu_s, tol),
            viol,
        )
    else:
        report.add("monotonicity", True, 0.0, "mu is not below tau; vacuous")

    hered = 0.0
    for alpha in (0.3, 0.7, 1.0):
        hered = max(hered, np.max(np.abs(decompose(alpha * dm.mu_s, lam, tol).mu_ac.values)))
        hered = max(hered, np.max(np.abs(decompose(alpha * dm.mu_ac, lam, tol).mu_s.values)))
    report.add("hereditary", hered <= bound, hered)

    verdict_s = is_singular(dm.mu_s, lam, tol)
    verdict_ac = bool(is_absolutely_continuous(dm.mu_ac, lam, tol))
    report.add("parts_singular", verdict_s, op_norm(parallel_sum(dm.mu_s.gram, lam.gram, tol)))
    report.add("parts_absolutely_continuous", verdict_ac, 0.0)

    perm = list(range(mu.algebra.dim))[::-1]
    alg_p = mu.algebra.permuted(perm)
    dp = decompose(PLF(alg_p, mu.values[perm]), PLF(alg_p, lam.values[perm]), tol)
    uniq = max(
        float(np.max(np.abs(dp.mu_ac.values - dm.mu_ac.values[perm]))),
        float(np.max(np.abs(dp.mu_s.values - dm.mu_s.values[perm]))),
    )
    report.add("uniqueness", uniq <= bound, uniq)
    log.debug("property suite: %s", {c.name: c.passed for c in report.checks})
    return report
