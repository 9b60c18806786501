"""Classical decomposition of measures on finitely many atoms, and its comparison with the
operator-algebraic pipeline on diagonal algebras."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from nclebesgue.core.exceptions import InvalidMatrix, NotPositive
from nclebesgue.decomposition.lebesgue import decompose
from nclebesgue.decomposition.radon_nikodym import derivative
from nclebesgue.linalg.numerics import DEFAULT_TOLERANCE, Tolerance, dagger
from nclebesgue.operators.algebra import CStarAlgebra, diagonal_algebra
from nclebesgue.operators.functional import PLF, plf_from_density
from nclebesgue.operators.gns import gns

log = logging.getLogger(__name__)

ORACLE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class FiniteMeasure:
    """Non-negative masses on atoms ``0..m-1``."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if not np.all(np.isfinite(w)):
            raise InvalidMatrix("measure has non-finite weights")
        if np.any(w < 0):
            raise NotPositive(f"measure has negative weight {float(w.min())}")
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])

    @property
    def support(self) -> np.ndarray:
        return self.weights > 0


@dataclass(frozen=True)
class ClassicalDecomposition:
    """``ac + s = mu``; ``density[i] = mu_i / lambda_i`` on the support of lambda, 0 elsewhere."""

    ac: np.ndarray
    s: np.ndarray
    density: np.ndarray
    support: np.ndarray


@dataclass(frozen=True)
class CrossValidation:
    ac_error: float
    s_error: float
    density_error: float
    gns_dim: int
    support_size: int

    @property
    def worst(self) -> float:
        return max(self.ac_error, self.s_error, self.density_error)

    @property
    def passed(self) -> bool:
        return self.worst <= ORACLE_TOLERANCE and self.gns_dim == self.support_size


def _same_size(mu: FiniteMeasure, lam: FiniteMeasure) -> None:
    if mu.size != lam.size:
        raise InvalidMatrix(f"measures have {mu.size} and {lam.size} atoms")


def classical_decompose(mu: FiniteMeasure, lam: FiniteMeasure) -> ClassicalDecomposition:
    _same_size(mu, lam)
    support = lam.support
    ac = np.where(support, mu.weights, 0.0)
    density = np.zeros_like(mu.weights)
    density[support] = mu.weights[support] / lam.weights[support]
    return ClassicalDecomposition(ac, mu.weights - ac, density, support)


def embed_diagonal(
    m: FiniteMeasure, alg: CStarAlgebra | None = None, tol: Tolerance = DEFAULT_TOLERANCE
) -> tuple[CStarAlgebra, PLF]:
    """The diagonal algebra of size ``m`` and the functional ``f -> sum_i m_i f_i``."""
    alg = alg or diagonal_algebra(m.size, tol)
    return alg, plf_from_density(alg, np.diag(m.weights).astype(complex))


def _weights(plf: PLF) -> np.ndarray:
    return np.real(np.diag(plf.density))


def cross_validate(
    mu: FiniteMeasure, lam: FiniteMeasure, tol: Tolerance = DEFAULT_TOLERANCE
) -> CrossValidation:
    """Decompose the embedded pair, take the derivative of the absolutely continuous part, and
    compare both with :func:`classical_decompose` atom by atom."""
    oracle = classical_decompose(mu, lam)
    alg, mu_plf = embed_diagonal(mu, tol=tol)
    _, lam_plf = embed_diagonal(lam, alg, tol)

    parts = decompose(mu_plf, lam_plf, tol)
    ac_error = float(np.max(np.abs(_weights(parts.mu_ac) - oracle.ac)))
    s_error = float(np.max(np.abs(_weights(parts.mu_s) - oracle.s)))

    data = gns(alg, lam_plf, tol)
    density_error = 0.0
    if not data.degenerate:
        deriv = derivative(parts.mu_ac, lam_plf, data, tol)
        for i in np.flatnonzero(oracle.support):
            unit = np.zeros((mu.size, mu.size), dtype=complex)
            unit[i, i] = 1.0
            v = data.vector(unit)
            f_i = float(np.real(dagger(v) @ deriv.operator @ v / (dagger(v) @ v)))
            density_error = max(density_error, abs(f_i - oracle.density[i]))
    result = CrossValidation(ac_error, s_error, density_error, data.gns_dim, int(oracle.support.sum()))
    if not result.passed:
        log.warning("classical cross-validation failed: worst error %.3e", result.worst)
    return result
