"""Inner dynamics, KMS states and modular theory."""

from nclebesgue.dynamics.kms import (
    Dynamics,
    ModularData,
    gibbs,
    is_kms,
    kms_residual,
    make_dynamics,
    modular_operator,
    sigma,
)

__all__ = [
    "Dynamics",
    "ModularData",
    "gibbs",
    "is_kms",
    "kms_residual",
    "make_dynamics",
    "modular_operator",
    "sigma",
]
