"""Tolerance-aware dense linear algebra kernels."""

from nclebesgue.linalg.numerics import (
    DEFAULT_TOLERANCE,
    PsdReport,
    Tolerance,
    ando_iterates,
    hermitian_eig,
    hermitian_function,
    matrix_exp,
    null_space,
    parallel_sum,
    pseudo_inverse,
    psd_check,
    range_basis,
    shorted_operator,
    spectral_split,
)

__all__ = [
    "DEFAULT_TOLERANCE",
    "PsdReport",
    "Tolerance",
    "ando_iterates",
    "hermitian_eig",
    "hermitian_function",
    "matrix_exp",
    "null_space",
    "parallel_sum",
    "pseudo_inverse",
    "psd_check",
    "range_basis",
    "shorted_operator",
    "spectral_split",
]
