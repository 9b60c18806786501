"""GNS construction, transfer of functionals, and the finite-dimensional L-infinity algebra."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from nclebesgue.core.exceptions import IllDefined, NotRepresentable
from nclebesgue.linalg.numerics import (
    Tolerance,
    dagger,
    hermitian_eig,
    null_space,
    rank_cutoff,
    spectral_split,
)
from nclebesgue.operators.algebra import CStarAlgebra, Subspace, double_commutant, from_span
from nclebesgue.operators.functional import PLF, ideal_contained, require_positive

log = logging.getLogger(__name__)

# Exhaustive homomorphism checks above this many basis pairs switch to a fixed sample.
_MAX_PAIRS = 400


@dataclass(frozen=True, eq=False)
class GnsData:
    """The GNS triple of a positive functional, in coordinates.

    Attributes:
        algebra: Source algebra.
        state: The functional lambda.
        eigenvalues: Nonzero eigenvalues of the Gram form, descending.
        eigenvectors: Matching eigenvectors (``d x r``).
        quotient_map: ``Q = U_r diag(sqrt(e))``; the class of coordinates ``x`` is ``Q* x``.
        rep: ``rep[i] = pi(b_i)``, shape ``(d, r, r)``.
        cyclic_vector: Class of the unit.
    """

    algebra: CStarAlgebra
    state: PLF
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    quotient_map: np.ndarray
    rep: np.ndarray
    cyclic_vector: np.ndarray
    tol: Tolerance

    @property
    def gns_dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    @property
    def degenerate(self) -> bool:
        return self.gns_dim == 0

    @cached_property
    def rep_algebra(self) -> CStarAlgebra:
        """The image ``pi(A)`` inside M_r."""
        return from_span(list(self.rep), self.gns_dim, self.tol)

    @cached_property
    def linf(self) -> CStarAlgebra:
        """``pi(A)''``; equal to the image itself in finite dimension (checked)."""
        return double_commutant(self.rep_algebra)

    def represent(self, a: np.ndarray) -> np.ndarray:
        """``pi(a)`` for an element of the algebra."""
        return np.einsum("i,iab->ab", self.algebra.coords(a), self.rep)

    def vector(self, a: np.ndarray) -> np.ndarray:
        """The class ``a + N_lambda`` as a vector in C^r."""
        return dagger(self.quotient_map) @ self.algebra.coords(a)


@dataclass(frozen=True)
class GnsResiduals:
    homomorphism: float
    adjoint: float
    state: float
    cyclic_rank: int
    gns_dim: int

    @property
    def cyclic(self) -> bool:
        return self.cyclic_rank == self.gns_dim

    def worst(self) -> float:
        return max(self.homomorphism, self.adjoint, self.state)


def gns(alg: CStarAlgebra, lam: PLF, tol: Tolerance | None = None) -> GnsData:
    """GNS construction for ``lam``.

    L2(lambda) is the non-null eigenspace of the Gram form; ``pi(b_i)[l, m]`` is
    ``sqrt(e_l / e_m) tr(F_l* b_i F_m) / n`` with ``F_l`` the matrix of the ``l``-th eigenvector.

    Raises:
        NotPositive: if ``lam`` is not positive.
    """
    tol = tol or alg.tol
    require_positive(lam, tol, "lambda")
    evals, u_r, _ = spectral_split(lam.gram, tol)
    evals = np.clip(evals, 0.0, None)
    r = evals.shape[0]
    n, d = alg.ambient_dim, alg.dim
    sq = np.sqrt(evals)
    quotient = u_r * sq
    rep = np.zeros((d, r, r), dtype=complex)
    if r:
        frames = np.einsum("kl,kab->lab", u_r, alg.basis)
        frames_h = np.conj(np.transpose(frames, (0, 2, 1)))
        for i, b in enumerate(alg.basis):
            left = np.einsum("lab,bc->lac", frames_h, b)
            inner = np.einsum("lac,mca->lm", left, frames) / n
            rep[i] = (sq[:, None] * inner) / sq[None, :]
    xi = dagger(quotient) @ alg.unit_coords
    log.debug("gns: d=%d, r=%d, min eigenvalue kept %.3e", d, r, float(evals[-1]) if r else 0.0)
    return GnsData(alg, lam, evals, u_r, quotient, rep, xi, tol)


def gns_residuals(data: GnsData) -> GnsResiduals:
    """Homomorphism, adjoint, state-reconstruction and cyclicity diagnostics."""
    alg = data.algebra
    d = alg.dim
    if data.degenerate:
        return GnsResiduals(0.0, 0.0, float(np.max(np.abs(data.state.values))), 0, 0)
    pairs = [(i, j) for i in range(d) for j in range(d)]
    if len(pairs) > _MAX_PAIRS:
        rng = np.random.default_rng(0)
        pairs = [pairs[k] for k in rng.choice(len(pairs), _MAX_PAIRS, replace=False)]
    hom = 0.0
    for i, j in pairs:
        prod = data.represent(alg.basis[i] @ alg.basis[j])
        hom = max(hom, float(np.linalg.norm(data.rep[i] @ data.rep[j] - prod)))
    adj = max(float(np.linalg.norm(p - dagger(p))) for p in data.rep)
    xi = data.cyclic_vector
    recon = np.array([dagger(xi) @ p @ xi for p in data.rep])
    state = float(np.max(np.abs(recon - data.state.values)))
    orbit = np.stack([p @ xi for p in data.rep], axis=1)
    svals = np.linalg.svd(orbit, compute_uv=False)
    cyclic_rank = int(np.sum(svals > rank_cutoff(svals, data.tol)))
    return GnsResiduals(hom, adj, state, cyclic_rank, data.gns_dim)


def representation_kernel(data: GnsData) -> Subspace:
    """``ker pi_lambda`` as a subspace of coordinate space."""
    d, r = data.algebra.dim, data.gns_dim
    if r == 0:
        return Subspace(np.eye(d, dtype=complex))
    stacked = data.rep.reshape(d, r * r).T
    return Subspace(null_space(stacked, data.tol))


def _preimage(data: GnsData, target: np.ndarray) -> np.ndarray:
    """Coordinates ``x`` with ``pi(sum x_i b_i) = target`` (least squares)."""
    d, r = data.algebra.dim, data.gns_dim
    stacked = data.rep.reshape(d, r * r).T
    x, *_ = np.linalg.lstsq(stacked, target.reshape(-1), rcond=None)
    return x


def transfer(data: GnsData, mu: PLF, tol: Tolerance | None = None) -> PLF:
    """The functional ``mu'(pi(a)) = mu(a)`` on the represented algebra.

    Raises:
        IllDefined: if ``N_lambda`` is not inside ``N_mu`` or ``ker pi_lambda`` is not
            annihilated by ``mu``; the message says which.
    """
    tol = tol or data.tol
    if data.degenerate:
        raise IllDefined("lambda is zero; L2(lambda) is trivial")
    if not ideal_contained(data.state, mu, tol):
        raise IllDefined("N_lambda is not contained in N_mu")
    ker = representation_kernel(data)
    if ker.rank:
        leak = float(np.max(np.abs(ker.basis.T @ mu.values)))
        if leak > tol.eq_abs * float(np.max(np.abs(mu.values))):
            raise IllDefined(f"ker pi_lambda is not annihilated by mu (|mu| up to {leak:.3e})")
    target = data.rep_algebra
    values = np.array([_preimage(data, c) @ mu.values for c in target.basis])
    return PLF(target, values)


def normal_decomposition_basis(data: GnsData, mu_hat: PLF) -> list[np.ndarray]:
    """Vectors ``xi_k`` with ``mu_hat(x) = sum_k <x xi_k, xi_k>`` on the algebra of ``mu_hat``.

    ``mu_hat`` lives on a subalgebra of M_r (normally ``linf``). Its density ``T`` within that
    algebra is spectrally decomposed, ``xi_k = sqrt(t_k) u_k``.

    Raises:
        NotRepresentable: if the vectors do not reproduce ``mu_hat`` within tolerance.
    """
    tol = data.tol
    alg = mu_hat.algebra
    if alg.ambient_dim != data.gns_dim:
        raise NotRepresentable(f"functional lives in M_{alg.ambient_dim}, GNS space has r={data.gns_dim}")
    evals, u = hermitian_eig(mu_hat.density, tol)
    keep = evals > rank_cutoff(evals, tol)
    vectors = [np.sqrt(evals[k]) * u[:, k] for k in np.flatnonzero(keep)]
    recon = np.array(
        [sum((dagger(v) @ c @ v for v in vectors), 0.0) for c in alg.basis], dtype=complex
    )
    residual = float(np.max(np.abs(recon - mu_hat.values))) if recon.size else 0.0
    scale = float(np.max(np.abs(mu_hat.values))) if mu_hat.values.size else 0.0
    if residual > 10 * tol.eq_abs * scale:
        raise NotRepresentable(f"vector decomposition residual {residual:.3e}")
    return vectors
