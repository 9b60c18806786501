"""Custom exception hierarchy for nclebesgue.

Every error carries an ``exit_code`` that the CLI maps to its process exit status:
1 for a negative mathematical verdict, 2 for bad input, 3 for a numerical-integrity failure.
"""

from __future__ import annotations


class NcLebesgueError(Exception):
    """Base exception for nclebesgue."""

    exit_code: int = 2


# ---------------------------------------------------------------------------
# Plumbing
# ---------------------------------------------------------------------------


class ConfigError(NcLebesgueError):
    """Raised when configuration loading or validation fails."""

    pass


class RegistryError(NcLebesgueError):
    """Raised when a component is not found or registration fails."""

    pass


class PipelineError(NcLebesgueError):
    """Raised when a pipeline stage fails."""

    pass


# ---------------------------------------------------------------------------
# Numerical kernel
# ---------------------------------------------------------------------------


class NumericsError(NcLebesgueError):
    """Base for matrix-kernel failures."""

    pass


class NotHermitian(NumericsError):
    """Raised when a matrix required to be Hermitian is not, within tolerance."""

    pass


class NotPSD(NumericsError):
    """Raised when a matrix required to be positive semidefinite is not."""

    pass


class InvalidMatrix(NumericsError):
    """Raised for non-square, mis-shaped or non-finite matrices."""

    pass


# ---------------------------------------------------------------------------
# Algebras and functionals
# ---------------------------------------------------------------------------


class AlgebraError(NcLebesgueError):
    """Base for algebra construction failures."""

    pass


class NonSquareGenerator(AlgebraError):
    """Raised when a generator is not an n x n matrix."""

    pass


class BicommutantMismatch(AlgebraError):
    """Raised when the double commutant differs from the input span."""

    exit_code = 3


class ClosureOverflow(AlgebraError):
    """Raised when the generated span exceeds n^2 dimensions."""

    exit_code = 3


class FunctionalError(NcLebesgueError):
    """Base for positive-functional failures."""

    pass


class NotPositive(FunctionalError):
    """Raised when a functional fails the positivity test."""

    pass


class NotInAlgebra(FunctionalError):
    """Raised when an element is evaluated outside the algebra it lives on."""

    pass


class NotTracial(FunctionalError):
    """Raised when a tracial functional is required and the given one is not."""

    exit_code = 1


class NoComplementUnit(FunctionalError):
    """Raised when the support projection of a functional cannot be found."""

    exit_code = 3


# ---------------------------------------------------------------------------
# GNS and dynamics
# ---------------------------------------------------------------------------


class GnsError(NcLebesgueError):
    """Base for GNS construction failures."""

    pass


class IllDefined(GnsError):
    """Raised when a functional cannot be transferred through the GNS representation."""

    exit_code = 1


class NotRepresentable(GnsError):
    """Raised when a functional on L-infinity has no vector decomposition within tolerance."""

    exit_code = 3


class KmsError(NcLebesgueError):
    """Base for dynamics and modular-theory failures."""

    pass


class NotCyclic(KmsError):
    """Raised when a vector is not cyclic for the algebra."""

    pass


class NotSeparating(KmsError):
    """Raised when a vector is not separating for the algebra."""

    pass


class HamiltonianNotInAlgebra(KmsError):
    """Raised when the Hamiltonian is not Hermitian or not inside the algebra."""

    pass


# ---------------------------------------------------------------------------
# Decomposition and derivative
# ---------------------------------------------------------------------------


class DecompositionError(NcLebesgueError):
    """Base for Lebesgue decomposition and derivative failures."""

    pass


class RepresentabilityBreach(DecompositionError):
    """Raised when the shorted Gram form is not the Gram form of its own functional."""

    exit_code = 3


class NotAbsolutelyContinuous(DecompositionError):
    """Raised when an operation needs absolute continuity and the pair lacks it."""

    exit_code = 1


class SolveSingular(DecompositionError):
    """Raised when the derivative system is rank deficient or leaves a residual."""

    exit_code = 3


class NotDominated(DecompositionError):
    """Raised when mu <= t * lambda fails for the requested bound."""

    exit_code = 1


# ---------------------------------------------------------------------------
# Instance files
# ---------------------------------------------------------------------------


class InstanceError(NcLebesgueError):
    """Base for instance-file problems."""

    pass


class ParseError(InstanceError):
    """Raised when an instance file cannot be parsed; carries field and line context."""

    def __init__(self, message: str, *, field: str | None = None, line: int | None = None) -> None:
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class UnknownState(InstanceError):
    """Raised when a named state is missing from the instance."""

    pass


class MissingDynamics(InstanceError):
    """Raised when a command needs dynamics and the instance has none."""

    pass


class TooLarge(InstanceError):
    """Raised when a requested example exceeds the supported size."""

    pass
