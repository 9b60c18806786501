"""Algebras, positive functionals and the GNS construction."""

from nclebesgue.operators.algebra import (
    CStarAlgebra,
    center,
    commutant,
    double_commutant,
    full_matrix_algebra,
    generate,
)
from nclebesgue.operators.functional import (
    PLF,
    faithful_central_projection,
    is_positive,
    isotropic_ideal,
    leq,
    plf_from_density,
    plf_from_values,
)
from nclebesgue.operators.gns import GnsData, gns, gns_residuals, transfer

__all__ = [
    "PLF",
    "CStarAlgebra",
    "GnsData",
    "center",
    "commutant",
    "double_commutant",
    "faithful_central_projection",
    "full_matrix_algebra",
    "generate",
    "gns",
    "gns_residuals",
    "is_positive",
    "isotropic_ideal",
    "leq",
    "plf_from_density",
    "plf_from_values",
    "transfer",
]
