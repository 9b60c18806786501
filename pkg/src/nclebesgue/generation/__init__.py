"""Generated example instances."""

from nclebesgue.generation.spinchain import generate_spinchain, hamiltonian, site_operator

__all__ = [
    "generate_spinchain",
    "hamiltonian",
    "site_operator",
]
