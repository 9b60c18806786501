"""Finite windows of quantum spin chains as instance files."""

from __future__ import annotations

import logging
from functools import reduce
from typing import Literal

import numpy as np

from nclebesgue.core.config import SpinChainConfigModel
from nclebesgue.core.exceptions import TooLarge
from nclebesgue.core.instance import (
    MAX_AMBIENT_DIM,
    DensityState,
    DynamicsSpec,
    InstanceFile,
    matrix_to_pairs,
)
from nclebesgue.linalg.numerics import dagger

log = logging.getLogger(__name__)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

AlgebraChoice = Literal["full", "local"]


def site_operator(op: np.ndarray, site: int, sites: int) -> np.ndarray:
    """``op`` acting on one site of ``sites``, identity elsewhere."""
    factors = [op if k == site else IDENTITY for k in range(sites)]
    return reduce(np.kron, factors)


def bond_terms(model: str, sites: int) -> list[np.ndarray]:
    """Nearest-neighbour couplings on an open chain."""
    pairs = {
        "ising": [PAULI_Z],
        "heisenberg": [PAULI_X, PAULI_Y, PAULI_Z],
        "xy": [PAULI_X, PAULI_Y],
    }[model]
    terms = []
    for i in range(sites - 1):
        terms.append(sum(site_operator(p, i, sites) @ site_operator(p, i + 1, sites) for p in pairs))
    return terms


def field_terms(model: str, sites: int) -> list[np.ndarray]:
    """Transverse field for Ising, longitudinal field otherwise."""
    op = PAULI_X if model == "ising" else PAULI_Z
    return [site_operator(op, i, sites) for i in range(sites)]


def hamiltonian(model: str, sites: int, coupling: float, field: float) -> np.ndarray:
    dim = 2**sites
    h = np.zeros((dim, dim), dtype=complex)
    for term in bond_terms(model, sites):
        h += coupling * term
    for term in field_terms(model, sites):
        h += field * term
    return (h + dagger(h)) / 2


def _gibbs_density(h: np.ndarray, beta: float) -> np.ndarray:
    evals, u = np.linalg.eigh(h)
    weights = np.exp(-beta * (evals - evals.min()))
    weights /= weights.sum()
    rho = (u * weights) @ dagger(u)
    return (rho + dagger(rho)) / 2


def _random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ dagger(g)
    rho /= np.trace(rho).real
    return (rho + dagger(rho)) / 2


def generate_spinchain(
    sites: int,
    settings: SpinChainConfigModel | None = None,
    *,
    algebra: AlgebraChoice = "full",
) -> InstanceFile:
    """Open chain of ``sites`` spins with a Gibbs state ``lambda`` and a perturbed state ``mu``.

    ``mu = (1 - eps) lambda + eps sigma`` with ``sigma`` a random density drawn from ``seed``.
    With ``algebra="full"`` the instance is all of M_{2^L}; with ``"local"`` it is the algebra
    generated by the local Hamiltonian terms.

    Raises:
        TooLarge: if ``sites`` is outside ``1..max_sites`` or 2^L exceeds 64.
    """
    settings = settings or SpinChainConfigModel()
    if sites < 1 or sites > settings.max_sites or 2**sites > MAX_AMBIENT_DIM:
        raise TooLarge(f"spin chain with {sites} sites is outside 1..{settings.max_sites}")
    dim = 2**sites
    h = hamiltonian(settings.model, sites, settings.coupling, settings.field)
    rng = np.random.default_rng(settings.seed)
    lam = _gibbs_density(h, settings.beta)
    eps = settings.perturbation
    mu = (1 - eps) * lam + eps * _random_density(dim, rng)

    if algebra == "full":
        generators = [site_operator(op, i, sites) for i in range(sites) for op in (PAULI_X, PAULI_Z)]
        kind = "full"
    else:
        generators = bond_terms(settings.model, sites) + field_terms(settings.model, sites)
        kind = "generated"
    log.debug("spin chain: model=%s L=%d dim=%d algebra=%s", settings.model, sites, dim, algebra)

    return InstanceFile(
        ambient_dim=dim,
        kind=kind,
        generators=[matrix_to_pairs(g) for g in generators],
        states={
            "lambda": DensityState(type="density", matrix=matrix_to_pairs(lam)),
            "mu": DensityState(type="density", matrix=matrix_to_pairs(mu)),
        },
        dynamics=DynamicsSpec(hamiltonian=matrix_to_pairs(h), beta=settings.beta),
        meta={
            "algebra": algebra,
            "coupling": settings.coupling,
            "field": settings.field,
            "model": settings.model,
            "perturbation": eps,
            "seed": settings.seed,
            "sites": sites,
        },
    )
