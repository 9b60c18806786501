"""Positive linear functionals on a CStarAlgebra."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from nclebesgue.core.exceptions import NoComplementUnit, NotInAlgebra, NotPositive, NotPSD
from nclebesgue.linalg.numerics import (
    Tolerance,
    dagger,
    kernel_basis,
    null_space,
    op_norm,
    psd_check,
    range_basis,
    require_psd,
)
from nclebesgue.operators.algebra import CStarAlgebra, Subspace, center, from_span

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PLF:
    """A linear functional given by its values ``v_k = mu(b_k)`` on the algebra basis.

    The Gram form ``G[i, j] = mu(b_i* b_j)`` is computed at construction. Positivity is not
    enforced here; see :func:`is_positive`.
    """

    algebra: CStarAlgebra
    values: np.ndarray
    gram: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex).reshape(-1)
        if values.shape[0] != self.algebra.dim:
            raise ValueError(f"expected {self.algebra.dim} values, got {values.shape[0]}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "gram", self.algebra.gram(values))

    @property
    def norm(self) -> float:
        """``mu(1)``; for positive functionals this is the norm."""
        return float(np.real(self.values @ self.algebra.unit_coords))

    @property
    def density(self) -> np.ndarray:
        return self.algebra.density(self.values)

    def __call__(self, a: np.ndarray) -> complex:
        return evaluate(self, a)

    def __add__(self, other: PLF) -> PLF:
        _same_algebra(self, other)
        return PLF(self.algebra, self.values + other.values)

    def __sub__(self, other: PLF) -> PLF:
        _same_algebra(self, other)
        return PLF(self.algebra, self.values - other.values)

    def __mul__(self, scalar: float) -> PLF:
        return PLF(self.algebra, self.values * scalar)

    __rmul__ = __mul__

    def distance(self, other: PLF) -> float:
        """Max-abs difference of basis values."""
        _same_algebra(self, other)
        diff = self.values - other.values
        return float(np.max(np.abs(diff))) if diff.size else 0.0


def _same_algebra(a: PLF, b: PLF) -> None:
    if a.algebra is not b.algebra and not a.algebra.same_span(b.algebra):
        raise ValueError("functionals live on different algebras")


@dataclass(frozen=True, eq=False)
class IsotropicIdeal:
    """``N_mu = {a : mu(a* a) = 0}`` as a subspace of coordinate space."""

    subspace: Subspace
    left_ideal_residual: float = 0.0

    @property
    def rank(self) -> int:
        return self.subspace.rank


@dataclass(frozen=True, eq=False)
class FaithfulCompression:
    """Result of :func:`faithful_central_projection`.

    ``central_projection`` is the unit of the ideal complementary to ``ker pi_lambda``;
    ``support_projection`` (below it) is the support of lambda. The functional restricted to the
    corner ``p A p`` is faithful. Algebra and functional are None when lambda is zero.
    """

    central_projection: np.ndarray
    support_projection: np.ndarray
    algebra: CStarAlgebra | None
    plf: PLF | None
    embedding: np.ndarray | None = None


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def plf_from_values(alg: CStarAlgebra, values: np.ndarray) -> PLF:
    return PLF(alg, np.asarray(values, dtype=complex))


def zero_plf(alg: CStarAlgebra) -> PLF:
    return PLF(alg, np.zeros(alg.dim, dtype=complex))


def plf_from_density(alg: CStarAlgebra, rho: np.ndarray) -> PLF:
    """Functional ``a -> tr(rho a)`` restricted to the algebra.

    Raises:
        NotPSD: if ``rho`` is not positive semidefinite.
    """
    rho = require_psd(rho, alg.tol, "density")
    if rho.shape != (alg.ambient_dim, alg.ambient_dim):
        raise NotPSD(f"density has shape {rho.shape}, expected {alg.ambient_dim}x{alg.ambient_dim}")
    return PLF(alg, alg.values_from_density(rho))


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


def evaluate(plf: PLF, a: np.ndarray) -> complex:
    """``mu(a)``.

    Raises:
        NotInAlgebra: if ``a`` is not in the algebra within tolerance.
    """
    alg = plf.algebra
    a = np.asarray(a, dtype=complex)
    if not alg.contains(a):
        raise NotInAlgebra(f"element not in algebra (residual {alg.residual(a):.3e})")
    return complex(alg.coords(a) @ plf.values)


def _form_bound(plf: PLF, tol: Tolerance) -> float:
    return tol.eq_abs * op_norm(plf.gram)


def is_positive(plf: PLF, tol: Tolerance | None = None) -> bool:
    return psd_check(plf.gram, tol or plf.algebra.tol).is_psd


def require_positive(plf: PLF, tol: Tolerance | None = None, what: str = "functional") -> None:
    """Raise NotPositive unless ``plf`` passes :func:`is_positive`."""
    report = psd_check(plf.gram, tol or plf.algebra.tol)
    if not report:
        raise NotPositive(f"{what} is not positive (Gram min eigenvalue {report.min_eigenvalue:.3e})")


def isotropic_ideal(plf: PLF, tol: Tolerance | None = None) -> IsotropicIdeal:
    """Null space of the Gram form, with the left-ideal property checked on basis elements.

    Raises:
        NotPositive: if ``plf`` is not positive.
    """
    tol = tol or plf.algebra.tol
    require_positive(plf, tol)
    kernel = kernel_basis(plf.gram, tol)
    alg = plf.algebra
    worst = 0.0
    for k in range(kernel.shape[1]):
        x = alg.from_coords(kernel[:, k])
        for b in alg.basis:
            y = alg.coords(b @ x)
            worst = max(worst, float(np.real(dagger(y) @ plf.gram @ y)))
    if worst > _form_bound(plf, tol):
        log.warning("isotropic ideal fails the left-ideal check (residual %.3e)", worst)
    return IsotropicIdeal(Subspace(kernel), worst)


def leq(mu: PLF, nu: PLF, tol: Tolerance | None = None) -> bool:
    """True iff ``nu - mu`` is positive, with slack relative to the larger of the two forms."""
    _same_algebra(mu, nu)
    scale = max(op_norm(mu.gram), op_norm(nu.gram))
    return psd_check(nu.gram - mu.gram, tol or mu.algebra.tol, scale).is_psd


def ideal_contained(lam: PLF, mu: PLF, tol: Tolerance | None = None) -> bool:
    """True iff ``N_lambda`` is contained in ``N_mu``."""
    _same_algebra(lam, mu)
    tol = tol or lam.algebra.tol
    kernel = kernel_basis(lam.gram, tol)
    if kernel.shape[1] == 0:
        return True
    restricted = dagger(kernel) @ mu.gram @ kernel
    worst = float(np.max(np.abs(np.linalg.eigvalsh((restricted + dagger(restricted)) / 2))))
    return worst <= _form_bound(mu, tol)


def kadison_residual(plf: PLF, a: np.ndarray) -> float:
    """``||lambda|| lambda(a* a) - |lambda(a)|^2``; nonnegative for positive functionals."""
    a = np.asarray(a, dtype=complex)
    value = evaluate(plf, a)
    square = evaluate(plf, dagger(a) @ a)
    return float(plf.norm * np.real(square) - abs(value) ** 2)


# ---------------------------------------------------------------------------
# Faithful compression
# ---------------------------------------------------------------------------


def _ideal_unit(alg: CStarAlgebra, ideal_coords: np.ndarray) -> np.ndarray:
    """Unit ``z`` of the ideal spanned by the given coordinate columns: ``z k = k`` for all k."""
    n = alg.ambient_dim
    mats = [alg.from_coords(ideal_coords[:, m]) for m in range(ideal_coords.shape[1])]
    rows = []
    rhs = []
    for k_m in mats:
        rows.append(np.stack([(k_p @ k_m).reshape(-1) for k_p in mats], axis=1))
        rhs.append(k_m.reshape(-1))
    system = np.vstack(rows)
    target = np.concatenate(rhs)
    coeffs, *_ = np.linalg.lstsq(system, target, rcond=None)
    return np.einsum("p,pab->ab", coeffs, np.stack(mats)).reshape(n, n)


def faithful_central_projection(
    alg: CStarAlgebra, lam: PLF, tol: Tolerance | None = None
) -> FaithfulCompression:
    """Central carrier and faithful compression of ``lam``.

    ``z`` is the unit of the two-sided ideal complementary to ``ker pi_lambda``; ``p <= z`` is the
    support projection of ``lam`` and ``lam`` restricted to ``p A p`` is faithful. The compressed
    algebra is realized on ``range(p)``.

    Raises:
        NotPositive: if ``lam`` is not positive.
        NoComplementUnit: if ``z`` or ``p`` fails its projection checks.
    """
    from nclebesgue.operators.gns import gns, representation_kernel

    tol = tol or alg.tol
    n = alg.ambient_dim
    data = gns(alg, lam, tol)
    if data.degenerate:
        zero = np.zeros((n, n), dtype=complex)
        return FaithfulCompression(zero, zero, None, None)

    ker = representation_kernel(data)
    complement = null_space(dagger(ker.basis), tol) if ker.rank else np.eye(alg.dim, dtype=complex)
    z = _ideal_unit(alg, complement)
    bound = 10 * tol.eq_abs * max(1.0, op_norm(z))
    checks = {
        "idempotent": float(np.linalg.norm(z @ z - z)),
        "selfadjoint": float(np.linalg.norm(z - dagger(z))),
        "central": max(float(np.linalg.norm(z @ b - b @ z)) for b in alg.basis),
    }
    failed = {k: v for k, v in checks.items() if v > bound}
    if failed:
        raise NoComplementUnit(f"central carrier fails checks: {failed}")
    z = (z + dagger(z)) / 2
    if not center(alg).contains(z):
        raise NoComplementUnit("central carrier is not in the center")

    w = range_basis(lam.density, tol)
    p = w @ dagger(w)
    if not alg.contains(p) or float(np.linalg.norm(z @ p - p)) > bound:
        raise NoComplementUnit("support projection is not in the algebra below the carrier")

    compressed = from_span([dagger(w) @ b @ w for b in alg.basis], w.shape[1], tol)
    values = np.array([evaluate(lam, w @ c @ dagger(w)) for c in compressed.basis])
    plf = PLF(compressed, values)
    if kernel_basis(plf.gram, tol).shape[1]:
        raise NoComplementUnit("compressed functional is not faithful")
    log.debug(
        "faithful compression: rank z=%d, rank p=%d, d=%d",
        int(round(np.real(np.trace(z)))), w.shape[1], compressed.dim,
    )
    return FaithfulCompression(z, p, compressed, plf, w)
