"""Inner dynamics, Gibbs states, KMS checks and the finite-dimensional modular operator.

Conventions: ``sigma_z(a) = e^{izh} a e^{-izh}``, and a functional is KMS at inverse temperature
``beta`` when ``lambda(ab) = lambda(b sigma_{i beta}(a))``. With these conventions the Gibbs density
``e^{-beta h} / Z`` passes exactly.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from nclebesgue.core.exceptions import (
    HamiltonianNotInAlgebra,
    KmsError,
    NotCyclic,
    NotHermitian,
    NotInAlgebra,
    NotSeparating,
)
from nclebesgue.linalg.numerics import (
    Tolerance,
    dagger,
    hermitian_eig,
    op_norm,
    rank_cutoff,
    require_hermitian,
)
from nclebesgue.operators.algebra import CStarAlgebra, commutant
from nclebesgue.operators.functional import PLF, plf_from_density, plf_from_values

log = logging.getLogger(__name__)

DEFAULT_TIME_SAMPLES: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0, np.pi)


@dataclass(frozen=True, eq=False)
class Dynamics:
    """Conjugation dynamics by ``e^{ith}`` on an algebra.

    ``inner`` dynamics (the usual case) require ``h`` to lie in the algebra. Modular dynamics are
    outer in general; they are built with ``inner=False`` after checking that the flow preserves
    the algebra.
    """

    algebra: CStarAlgebra
    hamiltonian: np.ndarray
    beta: float
    inner: bool = True

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        return hermitian_eig(self.hamiltonian, self.algebra.tol)

    def with_beta(self, beta: float) -> Dynamics:
        return make_dynamics(self.algebra, self.hamiltonian, beta, inner=self.inner)


def make_dynamics(
    alg: CStarAlgebra, hamiltonian: np.ndarray, beta: float, *, inner: bool = True
) -> Dynamics:
    """Validate and build a Dynamics.

    Raises:
        HamiltonianNotInAlgebra: if ``h`` is not Hermitian, or (inner dynamics) not in ``alg``.
        KmsError: if ``beta`` is negative or not finite.
    """
    if not np.isfinite(beta) or beta < 0:
        raise KmsError(f"beta must be a finite non-negative number, got {beta}")
    try:
        h = require_hermitian(hamiltonian, alg.tol)
    except NotHermitian as e:
        raise HamiltonianNotInAlgebra(f"hamiltonian is not Hermitian: {e}") from e
    if h.shape != (alg.ambient_dim, alg.ambient_dim):
        raise HamiltonianNotInAlgebra(f"hamiltonian has shape {h.shape}")
    if inner and not alg.contains(h):
        raise HamiltonianNotInAlgebra(
            f"hamiltonian is not in the algebra (residual {alg.residual(h):.3e})"
        )
    return Dynamics(alg, h, float(beta), inner)


def _in_eigenbasis(dyn: Dynamics, z: complex, a: np.ndarray) -> np.ndarray:
    evals, u = dyn.spectrum
    rotated = dagger(u) @ a @ u
    phases = np.exp(1j * z * (evals[:, None] - evals[None, :]))
    return phases * rotated


def sigma(dyn: Dynamics, z: complex, a: np.ndarray) -> np.ndarray:
    """``e^{izh} a e^{-izh}``.

    Raises:
        NotInAlgebra: if ``a`` is not in the algebra.
    """
    a = np.asarray(a, dtype=complex)
    if not dyn.algebra.contains(a):
        raise NotInAlgebra("sigma applied to an element outside the algebra")
    _, u = dyn.spectrum
    return u @ _in_eigenbasis(dyn, z, a) @ dagger(u)


def gibbs(alg: CStarAlgebra, h: np.ndarray, beta: float) -> PLF:
    """Normalized Gibbs state ``tr(a e^{-beta h}) / tr(e^{-beta h})``."""
    dyn = make_dynamics(alg, h, beta)
    evals, u = dyn.spectrum
    weights = np.exp(-beta * (evals - evals.min())) if evals.size else evals
    weights = weights / weights.sum()
    rho = (u * weights) @ dagger(u)
    return plf_from_density(alg, (rho + dagger(rho)) / 2)


def kms_residual(lam: PLF, dyn: Dynamics) -> float:
    """``max_{i,j} |lambda(b_i b_j) - lambda(b_j sigma_{i beta}(b_i))|``.

    Evaluated in the eigenbasis of ``h`` so the large factors ``e^{beta (e_m - e_l)}`` multiply
    matrix entries one at a time.
    """
    alg = lam.algebra
    _, u = dyn.spectrum
    rho = dagger(u) @ lam.density @ u
    basis = np.einsum("ab,kbc,cd->kad", dagger(u), alg.basis, u)
    evals = dyn.spectrum[0]
    factors = np.exp(-dyn.beta * (evals[:, None] - evals[None, :]))
    shifted = basis * factors[None, :, :]
    left = np.einsum("ab,jbc->jac", rho, basis)
    rhs = np.einsum("jac,ica->ij", left, shifted)
    diff = lam.gram - rhs
    return float(np.max(np.abs(diff))) if diff.size else 0.0


def is_kms(lam: PLF, dyn: Dynamics, tol: Tolerance | None = None) -> bool:
    tol = tol or lam.algebra.tol
    return kms_residual(lam, dyn) <= tol.eq_abs * max(abs(lam.norm), tol.eq_abs)


def time_invariance_residual(
    lam: PLF, dyn: Dynamics, t_samples: Sequence[float] = DEFAULT_TIME_SAMPLES
) -> float:
    """``max_{t, i} |lambda(sigma_t(b_i)) - lambda(b_i)|`` over the sampled times."""
    alg = lam.algebra
    _, u = dyn.spectrum
    rho = dagger(u) @ lam.density @ u
    worst = 0.0
    for t in t_samples:
        for b, v in zip(alg.basis, lam.values, strict=True):
            moved = np.trace(rho @ _in_eigenbasis(dyn, t, b))
            worst = max(worst, abs(moved - v))
    return float(worst)


def gibbs_distance(lam: PLF, dyn: Dynamics) -> float:
    """Trace-norm distance between the normalized density of ``lam`` and the Gibbs density."""
    ref = gibbs(lam.algebra, dyn.hamiltonian, dyn.beta)
    norm = lam.norm
    if norm <= 0:
        return float("inf")
    diff = lam.density / norm - ref.density
    return float(np.sum(np.abs(np.linalg.eigvalsh((diff + dagger(diff)) / 2))))


def domination_residual(lam: PLF, x: np.ndarray, y: np.ndarray) -> float:
    """``2 ||x||^2 lambda(y) - |lambda(x* y x)|``; nonnegative when the domination bound holds."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    alg = lam.algebra
    lhs = abs(complex(alg.coords(dagger(x) @ y @ x) @ lam.values))
    bound = 2 * op_norm(x) ** 2 * float(np.real(alg.coords(y) @ lam.values))
    return float(bound - lhs)


# ---------------------------------------------------------------------------
# Modular theory
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModularResiduals:
    s_residual: float
    flow_residual: float
    kms_residual: float
    commutant_residual: float
    commutant_dim_ok: bool


@dataclass(frozen=True, eq=False)
class ModularData:
    """Modular objects of a cyclic separating vector.

    Attributes:
        algebra: The von Neumann algebra M inside M_N.
        eta: The cyclic separating vector.
        s_linear: ``K`` with ``S = K o conj``.
        nabla: ``S* S``, positive definite.
        j_linear: ``J_lin`` with ``J = J_lin o conj``.
        conjugation: ``J`` as a real-linear map on ``[Re psi; Im psi]``.
        residuals: The checks run by :func:`modular_operator`.
    """

    algebra: CStarAlgebra
    eta: np.ndarray
    s_linear: np.ndarray
    nabla: np.ndarray
    j_linear: np.ndarray
    conjugation: np.ndarray
    residuals: ModularResiduals | None = None

    @cached_property
    def hamiltonian(self) -> np.ndarray:
        """``-log nabla``; the modular flow is ``sigma_z(a) = e^{izh} a e^{-izh}``."""
        evals, u = hermitian_eig(self.nabla, self.algebra.tol)
        return (u * -np.log(evals)) @ dagger(u)

    def state(self) -> PLF:
        """The vector functional ``a -> <a eta, eta>`` on M."""
        eta = self.eta
        return plf_from_values(self.algebra, np.array([dagger(eta) @ b @ eta for b in self.algebra.basis]))

    def dynamics(self) -> Dynamics:
        return make_dynamics(self.algebra, self.hamiltonian, 1.0, inner=False)

    def conjugate(self, a: np.ndarray) -> np.ndarray:
        """``J a J`` for a linear operator ``a``."""
        return self.j_linear @ np.conj(a) @ np.conj(self.j_linear)


def modular_operator(m_alg: CStarAlgebra, eta: np.ndarray, tol: Tolerance | None = None) -> ModularData:
    """Tomita operator, modular operator and conjugation for ``eta``.

    With ``V = [b_k eta]``, ``S(V c) = V conj(c)`` so ``S = K o conj`` with ``K = V conj(V^-1)``;
    ``nabla = conj(K* K)`` and ``J_lin = K conj(nabla^{-1/2})``. The result carries
    :func:`modular_residuals`; a flow that leaves M or a vector state failing KMS at beta = 1 is
    logged as a warning.

    Raises:
        NotCyclic: if ``{m eta}`` does not span C^N.
        NotSeparating: if ``m eta = 0`` for some nonzero ``m``.
    """
    tol = tol or m_alg.tol
    big_n = m_alg.ambient_dim
    eta = np.asarray(eta, dtype=complex).reshape(-1)
    if eta.shape[0] != big_n:
        raise NotCyclic(f"vector has length {eta.shape[0]}, expected {big_n}")
    v = np.einsum("kab,b->ak", m_alg.basis, eta)
    svals = np.linalg.svd(v, compute_uv=False)
    rank = int(np.sum(svals > rank_cutoff(svals, tol)))
    if rank < big_n:
        raise NotCyclic(f"orbit spans {rank} of {big_n} dimensions")
    if rank < m_alg.dim:
        raise NotSeparating(f"orbit map has a {m_alg.dim - rank}-dimensional kernel")
    k = v @ np.conj(np.linalg.inv(v))
    nabla = np.conj(dagger(k) @ k)
    nabla = (nabla + dagger(nabla)) / 2
    evals, u = hermitian_eig(nabla, tol)
    inv_sqrt = (u / np.sqrt(evals)) @ dagger(u)
    j_lin = k @ np.conj(inv_sqrt)
    a, b = j_lin.real, j_lin.imag
    conj = np.block([[a, b], [b, -a]])
    log.debug("modular operator: N=%d, nabla spectrum [%.3e, %.3e]", big_n, evals[-1], evals[0])
    mod = ModularData(m_alg, eta, k, nabla, j_lin, conj)
    res = modular_residuals(mod)
    weight = float(np.real(np.vdot(eta, eta)))
    if res.flow_residual > 10 * tol.eq_abs or res.kms_residual > 10 * tol.eq_abs * weight:
        log.warning(
            "modular flow checks: flow residual %.3e, KMS residual %.3e",
            res.flow_residual, res.kms_residual,
        )
    return replace(mod, residuals=res)


def modular_residuals(mod: ModularData, t_samples: Sequence[float] = (0.7, -1.3)) -> ModularResiduals:
    """Checks on the modular data: ``S(m eta) = m* eta``, flow invariance of M, KMS at beta = 1,
    and ``J M J`` inside M'."""
    alg = mod.algebra
    v = np.einsum("kab,b->ak", alg.basis, mod.eta)
    s_res = float(np.linalg.norm(mod.s_linear @ np.conj(v) - v))
    dyn = mod.dynamics()
    flow = 0.0
    for t in t_samples:
        _, u = dyn.spectrum
        for b in alg.basis:
            moved = u @ _in_eigenbasis(dyn, t, b) @ dagger(u)
            flow = max(flow, alg.residual(moved))
    kms = kms_residual(mod.state(), dyn)
    comm = commutant(alg)
    images = [mod.conjugate(b) for b in alg.basis]
    comm_res = max(comm.residual(x) for x in images)
    dim_ok = comm.dim >= alg.dim and all(comm.contains(x) for x in images)
    return ModularResiduals(s_res, flow, kms, comm_res, dim_ok)
