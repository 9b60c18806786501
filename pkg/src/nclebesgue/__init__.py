"""nclebesgue: Lebesgue decomposition of positive functionals on finite-dimensional C*-algebras."""

__version__ = "0.1.0"
