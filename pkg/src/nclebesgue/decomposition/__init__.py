"""Lebesgue decomposition, Radon-Nikodym derivatives and the classical reference."""

from nclebesgue.decomposition.lebesgue import (
    Decomposition,
    decompose,
    is_absolutely_continuous,
    is_singular,
    property_suite,
    witness_sequence,
)
from nclebesgue.decomposition.oracle_classical import (
    FiniteMeasure,
    classical_decompose,
    cross_validate,
    embed_diagonal,
)
from nclebesgue.decomposition.radon_nikodym import Derivative, derivative, reconstruct

__all__ = [
    "Decomposition",
    "Derivative",
    "FiniteMeasure",
    "classical_decompose",
    "cross_validate",
    "decompose",
    "derivative",
    "embed_diagonal",
    "is_absolutely_continuous",
    "is_singular",
    "property_suite",
    "reconstruct",
    "witness_sequence",
]
