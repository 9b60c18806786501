"""Radon-Nikodym derivative of one functional with respect to another, in the GNS commutant."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from nclebesgue.core.exceptions import (
    InvalidMatrix,
    NotAbsolutelyContinuous,
    NotDominated,
    NotTracial,
    SolveSingular,
)
from nclebesgue.linalg.numerics import (
    Tolerance,
    dagger,
    hermitian_residual,
    op_norm,
    psd_check,
    psd_sqrt,
    rank_cutoff,
)
from nclebesgue.operators.algebra import CStarAlgebra, center, commutant_of
from nclebesgue.operators.functional import PLF, ideal_contained, leq, require_positive
from nclebesgue.operators.gns import GnsData, gns

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Derivative:
    """``D`` in ``pi_lambda(A)'`` with ``mu(a) = <pi(a) D xi, xi>``.

    Attributes:
        gns: GNS data of lambda.
        operator: The ``r x r`` matrix D.
        commutant: Algebra whose basis the coordinates refer to.
        commutant_coords: Coordinates of D in that basis.
        solve_residual: Max-abs residual of the linear solve.
    """

    gns: GnsData
    operator: np.ndarray
    commutant: CStarAlgebra | None
    commutant_coords: np.ndarray
    solve_residual: float = 0.0

    @cached_property
    def sqrt_d(self) -> np.ndarray:
        return psd_sqrt(self.operator, self.gns.tol)

    @cached_property
    def spectrum(self) -> np.ndarray:
        if self.operator.size == 0:
            return np.zeros(0)
        return np.sort(np.linalg.eigvalsh(self.operator))[::-1]

    @property
    def norm_bound(self) -> float:
        return float(self.spectrum[0]) if self.spectrum.size else 0.0

    @cached_property
    def affiliation_residual(self) -> float:
        """``max_i ||D pi(b_i) - pi(b_i) D||``."""
        d = self.operator
        if d.size == 0:
            return 0.0
        return max(float(np.linalg.norm(d @ p - p @ d)) for p in self.gns.rep)


def derivative(
    mu: PLF, lam: PLF, data: GnsData | None = None, tol: Tolerance | None = None
) -> Derivative:
    """Solve ``sum_m x_m <pi(b_i) C_m xi, xi> = mu(b_i)`` over a basis ``C_m`` of the commutant.

    The system has full column rank because ``xi`` is cyclic, hence separating for the commutant;
    a rank deficit or a large residual means the tolerances are wrong for this input.

    Raises:
        NotPositive: if either functional is not positive.
        NotAbsolutelyContinuous: if ``N_lambda`` is not inside ``N_mu``.
        SolveSingular: if the solve is rank-deficient, inconsistent, or yields a non-PSD operator.
    """
    tol = tol or lam.algebra.tol
    require_positive(mu, tol, "mu")
    data = data or gns(lam.algebra, lam, tol)
    if not ideal_contained(lam, mu, tol):
        raise NotAbsolutelyContinuous("N_lambda is not contained in N_mu")
    r = data.gns_dim
    if r == 0:
        return Derivative(data, np.zeros((0, 0), dtype=complex), None, np.zeros(0, dtype=complex))

    comm = commutant_of(list(data.rep), r, tol)
    xi = data.cyclic_vector
    # k[i, m] = <pi(b_i) C_m xi, xi>
    c_xi = np.einsum("mab,b->ma", comm.basis, xi)
    pi_c_xi = np.einsum("iab,mb->ima", data.rep, c_xi)
    system = np.einsum("a,ima->im", np.conj(xi), pi_c_xi)
    svals = np.linalg.svd(system, compute_uv=False)
    rank = int(np.sum(svals > rank_cutoff(svals, tol)))
    if rank < comm.dim:
        raise SolveSingular(f"derivative system has rank {rank} < {comm.dim}")
    coords, *_ = np.linalg.lstsq(system, mu.values, rcond=None)
    residual = float(np.max(np.abs(system @ coords - mu.values)))
    scale = float(np.max(np.abs(mu.values)))
    if residual > 10 * tol.eq_abs * scale:
        raise SolveSingular(f"derivative solve residual {residual:.3e}")

    d = comm.from_coords(coords)
    herm = hermitian_residual(d)
    if herm > 10 * tol.eq_abs * op_norm(d):
        raise SolveSingular(f"derivative is not Hermitian (residual {herm:.3e})")
    d = (d + dagger(d)) / 2
    report = psd_check(d, tol)
    if not report:
        raise SolveSingular(f"derivative is not PSD (min eigenvalue {report.min_eigenvalue:.3e})")
    log.debug("derivative: r=%d, commutant d'=%d, residual %.3e", r, comm.dim, residual)
    return Derivative(data, d, comm, coords, residual)


def reconstruct(deriv: Derivative, data: GnsData | None = None) -> PLF:
    """``a -> <pi(a) sqrt(D) xi, sqrt(D) xi>`` as a functional on the source algebra."""
    data = data or deriv.gns
    alg = data.algebra
    if data.degenerate:
        return PLF(alg, np.zeros(alg.dim, dtype=complex))
    eta = deriv.sqrt_d @ data.cyclic_vector
    values = np.einsum("a,iab,b->i", np.conj(eta), data.rep, eta)
    return PLF(alg, values)


def reconstruct_linear(deriv: Derivative) -> PLF:
    """``a -> <pi(a) D xi, xi>``; agrees with :func:`reconstruct` since D commutes with pi(A)."""
    data = deriv.gns
    alg = data.algebra
    if data.degenerate:
        return PLF(alg, np.zeros(alg.dim, dtype=complex))
    xi = data.cyclic_vector
    values = np.einsum("a,iab,b->i", np.conj(xi), data.rep, deriv.operator @ xi)
    return PLF(alg, values)


def bounded_domination_check(
    deriv: Derivative, mu: PLF, lam: PLF, t: float, tol: Tolerance | None = None
) -> bool:
    """True iff ``||D|| <= t`` and the ``D`` and ``sqrt(D)`` reconstructions agree.

    Raises:
        NotDominated: if ``mu <= t lambda`` does not hold.
    """
    tol = tol or lam.algebra.tol
    if not leq(mu, t * lam, tol):
        raise NotDominated(f"mu is not dominated by {t} * lambda")
    scale = float(np.max(np.abs(mu.values)))
    forms_agree = reconstruct(deriv).distance(reconstruct_linear(deriv)) <= 10 * tol.eq_abs * scale
    return deriv.norm_bound <= t + tol.eq_abs * max(1.0, t) and forms_agree


def resolvent_distance(d1: Derivative, d2: Derivative) -> float:
    """``||(I + D1)^-1 - (I + D2)^-1||``."""
    a, b = d1.operator, d2.operator
    if a.shape != b.shape:
        raise InvalidMatrix(f"derivatives live on different spaces: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    eye = np.eye(a.shape[0])
    return op_norm(np.linalg.inv(eye + a) - np.linalg.inv(eye + b))


def tracial_density(mu: PLF, lam: PLF, tol: Tolerance | None = None) -> np.ndarray:
    """The element ``x`` of the algebra with ``mu(a) = lambda(a x)``, for faithful tracial lambda.

    On L2(lambda) the derivative of mu is right multiplication by ``x``.

    Raises:
        NotTracial: if lambda is not tracial or not faithful.
    """
    tol = tol or lam.algebra.tol
    alg = lam.algebra
    rho = lam.density
    if not center(alg).contains(rho):
        raise NotTracial("lambda is not tracial (density is not central)")
    evals = np.linalg.eigvalsh((rho + dagger(rho)) / 2)
    if evals.size and evals[0] <= rank_cutoff(evals, tol):
        raise NotTracial("lambda is not faithful")
    x = np.linalg.solve(rho, mu.density)
    return (x + dagger(x)) / 2
