"""Deterministic complex-matrix kernel.

Eigendecompositions, exponentials, pseudo-inverses, PSD tests, shorted operators and parallel
sums. Every rank and tolerance decision made anywhere in the package goes through this module.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from pydantic import BaseModel, ConfigDict, Field

from nclebesgue.core.exceptions import InvalidMatrix, NotHermitian, NotPSD

log = logging.getLogger(__name__)


class Tolerance(BaseModel):
    """Numerical knobs shared by every operation.

    Attributes:
        rank_rel: Relative eigenvalue / singular-value cutoff for rank decisions.
        eq_abs: Absolute residual bound for equality assertions.
        psd_slack: Allowed negative-eigenvalue magnitude, relative to the matrix norm.
    """

    model_config = ConfigDict(frozen=True)

    rank_rel: float = Field(default=1e-9, gt=0.0, lt=1.0)
    eq_abs: float = Field(default=1e-9, gt=0.0)
    psd_slack: float = Field(default=1e-9, gt=0.0)


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class PsdReport:
    """Outcome of :func:`psd_check`."""

    is_psd: bool
    min_eigenvalue: float
    norm: float

    def __bool__(self) -> bool:
        return self.is_psd


# ---------------------------------------------------------------------------
# Validation helpers
# ---------------------------------------------------------------------------


def as_matrix(m: object, *, square: bool = True) -> np.ndarray:
    """Return ``m`` as a finite complex 2-D array, raising InvalidMatrix otherwise."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise InvalidMatrix(f"expected a 2-D matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrix("matrix has NaN or infinite entries")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def op_norm(m: np.ndarray) -> float:
    """Spectral norm; 0 for empty matrices."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def hermitian_residual(m: np.ndarray) -> float:
    return float(np.linalg.norm(m - dagger(m))) if m.size else 0.0


def require_hermitian(m: object, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Validate Hermitian symmetry (scale-aware) and return the symmetrized matrix."""
    arr = as_matrix(m)
    residual = hermitian_residual(arr)
    bound = tol.eq_abs * max(1.0, op_norm(arr))
    if residual > bound:
        raise NotHermitian(f"symmetry residual {residual:.3e} exceeds {bound:.3e}")
    return (arr + dagger(arr)) / 2


def rank_cutoff(
    values: np.ndarray, tol: Tolerance, scale: float | None = None
) -> float:
    """Threshold below which eigen- or singular values count as zero.

    ``rank_rel`` times the largest magnitude, or times ``scale`` when that is larger (a block cut
    out of a bigger matrix is judged against the parent). An all-zero input has cutoff 0, and
    since callers compare strictly it has rank 0.
    """
    peak = float(np.max(np.abs(values))) if np.size(values) else 0.0
    return tol.rank_rel * max(peak, scale or 0.0)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make the first significant component of every column real and positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        peak = np.max(np.abs(col)) if col.size else 0.0
        if peak == 0.0:
            continue
        idx = int(np.argmax(np.abs(col) > 1e-8 * peak))
        out[:, k] = col * (np.conj(col[idx]) / abs(col[idx]))
    return out


# ---------------------------------------------------------------------------
# Spectral operations
# ---------------------------------------------------------------------------


def hermitian_eig(
    m: object, tol: Tolerance = DEFAULT_TOLERANCE
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns:
        ``(eigenvalues, U)`` with eigenvalues in descending order and ``m = U diag(e) U*``.
        Eigenvector phases follow a fixed convention so results are reproducible.

    Raises:
        NotHermitian: if the symmetry residual exceeds the tolerance.
    """
    h = require_hermitian(m, tol)
    if h.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    evals, evecs = np.linalg.eigh(h)
    order = np.argsort(-evals, kind="stable")
    return evals[order], _fix_phases(evecs[:, order])


def hermitian_function(
    m: object,
    func: Callable[[np.ndarray], np.ndarray],
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> np.ndarray:
    """Apply ``func`` to the spectrum of a Hermitian matrix."""
    evals, u = hermitian_eig(m, tol)
    return (u * func(evals)) @ dagger(u)


def psd_sqrt(m: object, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    return hermitian_function(m, lambda e: np.sqrt(np.clip(e, 0.0, None)), tol)


def matrix_exp(m: object) -> np.ndarray:
    """Matrix exponential.

    Hermitian and skew-Hermitian inputs go through their spectral decomposition; anything else
    uses scaling and squaring.
    """
    arr = as_matrix(m)
    if arr.shape[0] == 0:
        return arr.copy()
    scale = op_norm(arr)
    if hermitian_residual(arr) <= 1e-13 * scale:
        evals, u = np.linalg.eigh((arr + dagger(arr)) / 2)
        return (u * np.exp(evals)) @ dagger(u)
    if float(np.linalg.norm(arr + dagger(arr))) <= 1e-13 * scale:
        herm = -1j * arr
        evals, u = np.linalg.eigh((herm + dagger(herm)) / 2)
        return (u * np.exp(1j * evals)) @ dagger(u)
    return sla.expm(arr)


def pseudo_inverse(m: object, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Moore-Penrose inverse; singular values below ``rank_rel`` times the largest are dropped."""
    arr = as_matrix(m, square=False)
    if arr.size == 0:
        return arr.T.copy()
    return sla.pinv(arr, atol=0.0, rtol=tol.rank_rel)


def psd_check(
    m: object, tol: Tolerance = DEFAULT_TOLERANCE, scale: float | None = None
) -> PsdReport:
    """Positivity test.

    Passes iff the smallest eigenvalue is at least ``-psd_slack * max(||m||, scale)``. Pass
    ``scale`` when ``m`` is a difference of larger matrices.

    Raises:
        NotHermitian: if ``m`` is not Hermitian within tolerance.
    """
    h = require_hermitian(m, tol)
    if h.shape[0] == 0:
        return PsdReport(is_psd=True, min_eigenvalue=0.0, norm=0.0)
    evals = np.linalg.eigvalsh(h)
    norm = float(np.max(np.abs(evals)))
    min_eig = float(evals[0])
    return PsdReport(
        is_psd=min_eig >= -tol.psd_slack * max(norm, scale or 0.0),
        min_eigenvalue=min_eig,
        norm=norm,
    )


def require_psd(m: object, tol: Tolerance = DEFAULT_TOLERANCE, what: str = "matrix") -> np.ndarray:
    report = psd_check(m, tol)
    if not report:
        raise NotPSD(f"{what} is not PSD (min eigenvalue {report.min_eigenvalue:.3e})")
    return require_hermitian(m, tol)


def spectral_split(
    m: object, tol: Tolerance = DEFAULT_TOLERANCE, scale: float | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split a Hermitian matrix into range and kernel.

    Returns:
        ``(eigenvalues_kept, range_basis, kernel_basis)``; the two bases are orthonormal columns.
    """
    evals, u = hermitian_eig(m, tol)
    keep = np.abs(evals) > rank_cutoff(evals, tol, scale)
    return evals[keep], u[:, keep], u[:, ~keep]


def range_basis(
    m: object, tol: Tolerance = DEFAULT_TOLERANCE, scale: float | None = None
) -> np.ndarray:
    return spectral_split(m, tol, scale)[1]


def kernel_basis(
    m: object, tol: Tolerance = DEFAULT_TOLERANCE, scale: float | None = None
) -> np.ndarray:
    return spectral_split(m, tol, scale)[2]


def null_space(m: object, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Orthonormal basis of the right null space of an arbitrary matrix, via SVD."""
    arr = as_matrix(m, square=False)
    ncols = arr.shape[1]
    if arr.shape[0] == 0:
        return np.eye(ncols, dtype=complex)
    _, svals, vh = np.linalg.svd(arr, full_matrices=True)
    rank = int(np.sum(svals > rank_cutoff(svals, tol)))
    return _fix_phases(dagger(vh[rank:]))


def orthogonal_complement(basis: np.ndarray, dim: int, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Orthonormal basis of the complement of span(basis) in C^dim."""
    if basis.shape[1] == 0:
        return np.eye(dim, dtype=complex)
    return null_space(dagger(basis), tol)


def _hermitian_pinv(m: np.ndarray, tol: Tolerance, scale: float | None = None) -> np.ndarray:
    evals, rng, _ = spectral_split(m, tol, scale)
    return (rng / evals) @ dagger(rng)


# ---------------------------------------------------------------------------
# Shorted operators and parallel sums
# ---------------------------------------------------------------------------


def shorted_operator(
    g: object, s: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE
) -> np.ndarray:
    """Short a PSD matrix onto the span of the orthonormal columns ``s``.

    In block coordinates for ``s + s-perp`` the result is ``[[G11 - G12 G22^+ G21, 0], [0, 0]]``:
    the largest PSD matrix below ``g`` with range inside ``span(s)``.

    Raises:
        NotPSD: if ``g`` is not PSD.
    """
    gm = require_psd(g, tol, "shorted operand")
    n = gm.shape[0]
    s = np.asarray(s, dtype=complex).reshape(n, -1)
    if s.shape[1] == 0:
        return np.zeros_like(gm)
    perp = orthogonal_complement(s, n, tol)
    g11 = dagger(s) @ gm @ s
    if perp.shape[1] == 0:
        block = g11
    else:
        g12 = dagger(s) @ gm @ perp
        g22 = dagger(perp) @ gm @ perp
        block = g11 - g12 @ _hermitian_pinv(g22, tol, op_norm(gm)) @ dagger(g12)
    out = s @ block @ dagger(s)
    return (out + dagger(out)) / 2


def parallel_sum(a: object, b: object, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Parallel sum ``a:b = a - a (a + b)^+ a`` of two PSD matrices."""
    am = require_psd(a, tol, "left operand")
    bm = require_psd(b, tol, "right operand")
    if am.shape != bm.shape:
        raise InvalidMatrix(f"shape mismatch {am.shape} vs {bm.shape}")
    out = am - am @ _hermitian_pinv(am + bm, tol) @ am
    return (out + dagger(out)) / 2


def ando_iterates(
    a: object,
    b: object,
    ks: Iterable[int],
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> list[np.ndarray]:
    """Parallel sums ``a:(2^k b)`` for each ``k``, in a form that stays accurate for large ``k``.

    With ``a = L L*`` on its range and ``K = L^+ [b]_{ran a} L^+*`` (eigenvalues ``kappa``),
    ``a:(t b) = L V diag(t kappa / (1 + t kappa)) V* L*``. As ``t`` grows the sequence increases to
    the short of ``a`` onto the range of ``b``.
    """
    am = require_psd(a, tol, "left operand")
    bm = require_psd(b, tol, "right operand")
    evals, rng, _ = spectral_split(am, tol)
    if rng.shape[1] == 0:
        return [np.zeros_like(am) for _ in ks]
    factor = rng * np.sqrt(evals)
    factor_pinv = dagger(rng) / np.sqrt(evals)[:, None]
    b_short = shorted_operator(bm, rng, tol)
    kappa, v = hermitian_eig(factor_pinv @ b_short @ dagger(factor_pinv), tol)
    kappa = np.where(kappa > rank_cutoff(kappa, tol), kappa, 0.0)
    lv = factor @ v
    out = []
    for k in ks:
        t = 2.0 ** k
        weights = t * kappa / (1.0 + t * kappa)
        term = (lv * weights) @ dagger(lv)
        out.append((term + dagger(term)) / 2)
    log.debug("ando iterates: rank(a)=%d, rank(K)=%d", rng.shape[1], int(np.sum(kappa > 0)))
    return out
