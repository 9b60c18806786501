"""Finite-dimensional C*-algebras presented inside M_n.

An algebra is stored as a Hermitian basis that is orthonormal for the normalized trace inner
product ``<x, y> = tr(y* x) / n``. The identity is always the first basis element of generated
algebras, so ``coords_k(a) = tr(b_k a) / n``.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from nclebesgue.core.exceptions import (
    BicommutantMismatch,
    ClosureOverflow,
    InvalidMatrix,
    NonSquareGenerator,
)
from nclebesgue.linalg.numerics import (
    DEFAULT_TOLERANCE,
    Tolerance,
    dagger,
    kernel_basis,
    op_norm,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthonormal column vectors spanning a subspace of C^dim."""

    basis: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def rank(self) -> int:
        return int(self.basis.shape[1])

    def projector(self) -> np.ndarray:
        return self.basis @ dagger(self.basis)


@dataclass(frozen=True, eq=False)
class CStarAlgebra:
    """Unital self-adjoint matrix algebra given by an orthonormal Hermitian basis.

    Attributes:
        ambient_dim: Size ``n`` of the ambient matrices.
        basis: Array of shape ``(d, n, n)``.
        tol: Tolerance used for every rank decision made on this algebra.
    """

    ambient_dim: int
    basis: np.ndarray
    tol: Tolerance = field(default=DEFAULT_TOLERANCE)

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @cached_property
    def unit_coords(self) -> np.ndarray:
        return self.coords(np.eye(self.ambient_dim))

    @cached_property
    def structure(self) -> np.ndarray:
        """Structure constants ``c[i, j, k]`` with ``b_i* b_j = sum_k c[i, j, k] b_k``.

        Materialized on first use only; it has ``d^3`` entries.
        """
        n = self.ambient_dim
        prods = np.einsum("iab,jbc->ijac", self.basis, self.basis)
        return np.einsum("kca,ijac->ijk", self.basis, prods) / n

    @cached_property
    def left_mult(self) -> np.ndarray:
        """``left_mult[i]`` is the coordinate matrix of ``a -> b_i a``."""
        return np.transpose(self.structure, (0, 2, 1))

    def coords(self, a: np.ndarray) -> np.ndarray:
        """Coordinates of the orthogonal projection of ``a`` onto the algebra."""
        a = np.asarray(a, dtype=complex)
        if a.shape != (self.ambient_dim, self.ambient_dim):
            raise InvalidMatrix(f"expected {self.ambient_dim}x{self.ambient_dim}, got {a.shape}")
        return np.einsum("kij,ji->k", self.basis, a) / self.ambient_dim

    def from_coords(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("k,kij->ij", np.asarray(x, dtype=complex), self.basis)

    def residual(self, a: np.ndarray) -> float:
        a = np.asarray(a, dtype=complex)
        return float(np.linalg.norm(a - self.from_coords(self.coords(a))))

    def contains(self, a: np.ndarray) -> bool:
        a = np.asarray(a, dtype=complex)
        return self.residual(a) <= self.tol.eq_abs * float(np.linalg.norm(a))

    def density(self, values: np.ndarray) -> np.ndarray:
        """The element ``rho_A`` of the algebra with ``mu(a) = tr(rho_A a)`` for these values."""
        return self.from_coords(values) / self.ambient_dim

    def values_from_density(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return np.einsum("ab,kba->k", rho, self.basis)

    def gram(self, values: np.ndarray) -> np.ndarray:
        """Gram form ``G[i, j] = mu(b_i* b_j)``.

        Equal to the structure-constant contraction ``sum_k c[i, j, k] v_k``; computed as
        ``tr(rho_A b_i b_j)`` so the ``d^3`` tensor is never needed.
        """
        n = self.ambient_dim
        d = self.dim
        rho = self.density(values)
        left = np.einsum("ab,ibc->iac", rho, self.basis).reshape(d, n * n)
        right = np.transpose(self.basis, (0, 2, 1)).reshape(d, n * n)
        g = left @ right.T
        return (g + dagger(g)) / 2

    def permuted(self, perm: Sequence[int]) -> CStarAlgebra:
        """Same algebra with its basis reordered."""
        return CStarAlgebra(self.ambient_dim, self.basis[list(perm)], self.tol)

    def same_span(self, other: CStarAlgebra) -> bool:
        if self.dim != other.dim or self.ambient_dim != other.ambient_dim:
            return False
        return all(other.contains(b) for b in self.basis)


# ---------------------------------------------------------------------------
# Basis construction
# ---------------------------------------------------------------------------


def _hermitian_parts(mats: Sequence[np.ndarray]) -> list[np.ndarray]:
    out = []
    for m in mats:
        out.append((m + dagger(m)) / 2)
        out.append((m - dagger(m)) / 2j)
    return out


def _realify(mats: Sequence[np.ndarray], n: int) -> np.ndarray:
    """Columns ``[Re H; Im H] / sqrt(n)``; their dot product is the trace inner product."""
    if not mats:
        return np.zeros((2 * n * n, 0))
    stack = np.stack([np.asarray(m).reshape(-1) for m in mats], axis=1)
    return np.vstack([stack.real, stack.imag]) / np.sqrt(n)


def _unrealify(vectors: np.ndarray, n: int) -> np.ndarray:
    half = n * n
    cols = (vectors[:half] + 1j * vectors[half:]) * np.sqrt(n)
    return np.transpose(cols).reshape(-1, n, n)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        peak = np.max(np.abs(col))
        idx = int(np.argmax(np.abs(col) > 1e-8 * peak))
        if col[idx] < 0:
            out[:, k] = -col
    return out


def _extend_basis(current: np.ndarray, candidates: np.ndarray, tol: Tolerance) -> np.ndarray:
    """Orthonormal real columns spanning the part of ``candidates`` outside ``current``."""
    if candidates.shape[1] == 0:
        return candidates
    scale = float(np.max(np.linalg.norm(candidates, axis=0)))
    resid = candidates
    for _ in range(2):
        if current.shape[1]:
            resid = resid - current @ (current.T @ resid)
    u, svals, _ = np.linalg.svd(resid, full_matrices=False)
    keep = svals > tol.rank_rel * scale
    return _fix_signs(u[:, keep])


def _span_with_unit(mats: Sequence[np.ndarray], n: int, tol: Tolerance) -> np.ndarray:
    unit = _realify([np.eye(n, dtype=complex)], n)
    rest = _extend_basis(unit, _realify(_hermitian_parts(mats), n), tol)
    return np.hstack([unit, rest])


def from_span(
    matrices: Sequence[np.ndarray], n: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> CStarAlgebra:
    """Algebra spanned by ``matrices`` (plus the identity), assumed already closed.

    Raises:
        NonSquareGenerator: if a matrix is not n x n.
    """
    mats = _checked(matrices, n)
    vectors = _span_with_unit(mats, n, tol)
    return CStarAlgebra(n, _unrealify(vectors, n), tol)


def _checked(matrices: Sequence[np.ndarray], n: int) -> list[np.ndarray]:
    mats = []
    for idx, m in enumerate(matrices):
        arr = np.asarray(m, dtype=complex)
        if arr.shape != (n, n):
            raise NonSquareGenerator(f"generator {idx} has shape {arr.shape}, expected ({n}, {n})")
        if not np.all(np.isfinite(arr)):
            raise NonSquareGenerator(f"generator {idx} has non-finite entries")
        mats.append(arr)
    return mats


def generate(
    generators: Sequence[np.ndarray], n: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> CStarAlgebra:
    """Smallest unital self-adjoint algebra containing the generators.

    The span is repeatedly extended by products of the Hermitian generators with the directions
    added in the previous round, until no new direction appears.

    Raises:
        NonSquareGenerator: if a generator is not n x n.
        ClosureOverflow: if the span exceeds n^2 dimensions (numerical blow-up).
    """
    gens = _hermitian_parts(_checked(generators, n))
    gens = [g for g in gens if np.linalg.norm(g) > 0]
    basis = _span_with_unit(gens, n, tol)
    frontier = basis
    rounds = 0
    while frontier.shape[1] and basis.shape[1] < n * n:
        rounds += 1
        frontier_mats = _unrealify(frontier, n)
        products = [g @ f for g in gens for f in frontier_mats]
        frontier = _extend_basis(basis, _realify(_hermitian_parts(products), n), tol)
        basis = np.hstack([basis, frontier])
        if basis.shape[1] > n * n:
            raise ClosureOverflow(f"span reached {basis.shape[1]} > {n * n} dimensions")
    log.debug("generated algebra: n=%d, d=%d after %d rounds", n, basis.shape[1], rounds)
    return CStarAlgebra(n, _unrealify(basis, n), tol)


_SIMPLE_GAP = 1e-6


def generates_full_algebra(
    generators: Sequence[np.ndarray], n: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> bool:
    """Whether the generators and the identity generate all of M_n.

    A fixed random real combination ``h`` of the Hermitian generators is diagonalized. If its
    spectrum is simple, anything commuting with the generators is diagonal in the eigenbasis of
    ``h`` and is a scalar exactly when the generators link every pair of eigenvectors through a
    chain of nonzero matrix elements. A degenerate ``h`` falls back to :func:`generate`.
    """
    gens = [g for g in _hermitian_parts(_checked(generators, n)) if np.linalg.norm(g) > 0]
    if n == 1:
        return True
    if not gens:
        return False
    weights = np.random.default_rng(0).standard_normal(len(gens))
    h = sum(w * g for w, g in zip(weights, gens))
    evals, vecs = np.linalg.eigh(h)
    if np.min(np.diff(evals)) <= _SIMPLE_GAP * op_norm(h):
        log.debug("degenerate combination, checking n=%d by closure", n)
        return generate(gens, n, tol).dim == n * n
    coupling = sum(np.abs(dagger(vecs) @ g @ vecs) for g in gens)
    linked = coupling > tol.rank_rel * float(np.max(coupling))
    count, _ = connected_components(csr_matrix(linked), directed=False)
    return count == 1


def _diagonal_basis(n: int) -> list[np.ndarray]:
    basis = [np.eye(n, dtype=complex)]
    for k in range(1, n):
        diag = np.zeros(n)
        c = np.sqrt(n / (k * (k + 1)))
        diag[:k] = c
        diag[k] = -k * c
        basis.append(np.diag(diag).astype(complex))
    return basis


def diagonal_algebra(n: int, tol: Tolerance = DEFAULT_TOLERANCE) -> CStarAlgebra:
    """Diagonal matrices in M_n (the functions on n atoms)."""
    return CStarAlgebra(n, np.stack(_diagonal_basis(n)), tol)


def full_matrix_algebra(n: int, tol: Tolerance = DEFAULT_TOLERANCE) -> CStarAlgebra:
    """All of M_n, with an explicit orthonormal Hermitian basis (identity first)."""
    basis = _diagonal_basis(n)
    scale = np.sqrt(n / 2)
    for j in range(n):
        for k in range(j + 1, n):
            sym = np.zeros((n, n), dtype=complex)
            sym[j, k] = sym[k, j] = scale
            anti = np.zeros((n, n), dtype=complex)
            anti[j, k] = -1j * scale
            anti[k, j] = 1j * scale
            basis.extend([sym, anti])
    return CStarAlgebra(n, np.stack(basis), tol)


# ---------------------------------------------------------------------------
# Commutants and center
# ---------------------------------------------------------------------------


def commutant_of(
    matrices: Sequence[np.ndarray], n: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> CStarAlgebra:
    """``{x in M_n : x m = m x}`` for every given matrix, as an algebra."""
    eye = np.eye(n)
    gram = np.zeros((n * n, n * n), dtype=complex)
    for m in matrices:
        # row-major vec: vec(m x) = (m kron I) vec(x), vec(x m) = (I kron m^T) vec(x)
        ad = np.kron(m, eye) - np.kron(eye, m.T)
        gram += dagger(ad) @ ad
    kernel = kernel_basis(gram, tol)
    mats = [kernel[:, k].reshape(n, n) for k in range(kernel.shape[1])]
    return from_span(mats, n, tol)


def commutant(alg: CStarAlgebra) -> CStarAlgebra:
    """Commutant of ``alg`` inside M_n."""
    out = commutant_of(list(alg.basis), alg.ambient_dim, alg.tol)
    log.debug("commutant: d=%d -> d'=%d", alg.dim, out.dim)
    return out


def double_commutant(alg: CStarAlgebra) -> CStarAlgebra:
    """Commutant applied twice, checked against the input span.

    Raises:
        BicommutantMismatch: if the result does not span the same space as ``alg``.
    """
    out = commutant(commutant(alg))
    if not out.same_span(alg):
        raise BicommutantMismatch(f"double commutant has d={out.dim}, algebra has d={alg.dim}")
    return out


def center(alg: CStarAlgebra) -> CStarAlgebra:
    """Elements of ``alg`` commuting with all of ``alg``."""
    d, n = alg.dim, alg.ambient_dim
    gram = np.zeros((d, d), dtype=complex)
    for b in alg.basis:
        comms = (np.einsum("ab,kbc->kac", b, alg.basis) - np.einsum("kab,bc->kac", alg.basis, b))
        cols = comms.reshape(d, n * n).T
        gram += dagger(cols) @ cols
    kernel = kernel_basis(gram, alg.tol)
    mats = [alg.from_coords(kernel[:, k]) for k in range(kernel.shape[1])]
    return from_span(mats, n, alg.tol)


def coords(alg: CStarAlgebra, a: np.ndarray) -> np.ndarray:
    return alg.coords(a)


def contains(alg: CStarAlgebra, a: np.ndarray) -> bool:
    return alg.contains(a)

