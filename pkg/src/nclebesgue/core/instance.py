"""Instance files: one JSON document with generators, named states and optional dynamics.

Complex numbers are ``[re, im]`` pairs and matrices are row-major lists of rows.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Any, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from nclebesgue.core.exceptions import MissingDynamics, ParseError, TooLarge, UnknownState
from nclebesgue.dynamics.kms import Dynamics, make_dynamics
from nclebesgue.linalg.numerics import Tolerance
from nclebesgue.operators.algebra import (
    CStarAlgebra,
    full_matrix_algebra,
    generate,
    generates_full_algebra,
)
from nclebesgue.operators.functional import PLF, plf_from_density, plf_from_values

log = logging.getLogger(__name__)

MAX_AMBIENT_DIM = 64

ComplexPair = tuple[float, float]
MatrixData = list[list[ComplexPair]]


class DensityState(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["density"]
    matrix: MatrixData


class ValuesState(BaseModel):
    model_config = ConfigDict(extra="forbid")

    type: Literal["values"]
    vector: list[ComplexPair]


StateSpec = Annotated[Union[DensityState, ValuesState], Field(discriminator="type")]


class DynamicsSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    hamiltonian: MatrixData
    beta: float = Field(ge=0.0)


class ToleranceOverride(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rank_rel: float | None = Field(default=None, gt=0.0, lt=1.0)
    eq_abs: float | None = Field(default=None, gt=0.0)
    psd_slack: float | None = Field(default=None, gt=0.0)


class InstanceFile(BaseModel):
    """Parsed instance.

    ``kind = "full"`` declares the generators to generate all of M_n; the algebra is then built
    with its explicit basis instead of by closure.
    """

    model_config = ConfigDict(extra="forbid")

    ambient_dim: int = Field(ge=1)
    kind: Literal["generated", "full"] = "generated"
    generators: list[MatrixData] = Field(default_factory=list)
    states: dict[str, StateSpec] = Field(default_factory=dict)
    dynamics: DynamicsSpec | None = None
    tolerance: ToleranceOverride | None = None
    meta: dict[str, Any] | None = None


# ---------------------------------------------------------------------------
# Conversion helpers
# ---------------------------------------------------------------------------


def matrix_from_pairs(rows: MatrixData) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex).reshape(
        len(rows), -1
    )


def vector_from_pairs(entries: list[ComplexPair]) -> np.ndarray:
    return np.array([complex(re, im) for re, im in entries], dtype=complex)


def matrix_to_pairs(m: np.ndarray) -> MatrixData:
    return [[(float(z.real), float(z.imag)) for z in row] for row in np.asarray(m, dtype=complex)]


def vector_to_pairs(v: np.ndarray) -> list[ComplexPair]:
    return [(float(z.real), float(z.imag)) for z in np.asarray(v, dtype=complex).reshape(-1)]


def _check_matrix(rows: MatrixData, n: int, field: str) -> None:
    if len(rows) != n or any(len(row) != n for row in rows):
        raise ParseError(f"expected a {n}x{n} matrix", field=field)


def _check_shapes(inst: InstanceFile) -> None:
    n = inst.ambient_dim
    for idx, gen in enumerate(inst.generators):
        _check_matrix(gen, n, f"generators.{idx}")
    for name, state in inst.states.items():
        if isinstance(state, DensityState):
            _check_matrix(state.matrix, n, f"states.{name}.matrix")
    if inst.dynamics is not None:
        _check_matrix(inst.dynamics.hamiltonian, n, "dynamics.hamiltonian")


# ---------------------------------------------------------------------------
# Load / dump
# ---------------------------------------------------------------------------


def parse_instance(text: str) -> InstanceFile:
    """Parse instance JSON text.

    Raises:
        ParseError: on JSON syntax errors (with line), schema violations (with dotted field path)
            and inconsistent shapes.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", line=e.lineno) from e
    try:
        inst = InstanceFile.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise ParseError(first["msg"], field=field or None) from e
    _check_shapes(inst)
    return inst


def load_instance(path: Path) -> InstanceFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    return parse_instance(text)


def dump_instance(inst: InstanceFile) -> str:
    """Deterministic serialization: sorted keys, indent 2, trailing newline."""
    data = inst.model_dump(mode="json", exclude_none=True)
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Materialization
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LoadedInstance:
    """An instance with its algebra, functionals and dynamics built."""

    spec: InstanceFile
    algebra: CStarAlgebra
    states: dict[str, PLF]
    dynamics: Dynamics | None
    tol: Tolerance

    def state(self, name: str) -> PLF:
        if name not in self.states:
            known = ", ".join(sorted(self.states)) or "none"
            raise UnknownState(f"no state named {name!r} (available: {known})")
        return self.states[name]

    def require_dynamics(self, beta: float | None = None) -> Dynamics:
        if self.dynamics is None:
            raise MissingDynamics("instance has no dynamics section")
        return self.dynamics if beta is None else self.dynamics.with_beta(beta)


def instance_tolerance(inst: InstanceFile, base: Tolerance) -> Tolerance:
    """``base`` with the instance's tolerance overrides applied."""
    if inst.tolerance is None:
        return base
    overrides = inst.tolerance.model_dump(exclude_none=True)
    return base.model_copy(update=overrides)


def build_instance(inst: InstanceFile, tol: Tolerance, beta: float | None = None) -> LoadedInstance:
    """Build the algebra, the named functionals and (if present) the dynamics.

    Raises:
        TooLarge: if the ambient dimension exceeds 64.
        ParseError: if a value vector has the wrong length for the generated algebra, or if
            ``kind = "full"`` lists generators that do not generate M_n.
    """
    n = inst.ambient_dim
    if n > MAX_AMBIENT_DIM:
        raise TooLarge(f"ambient dimension {n} exceeds {MAX_AMBIENT_DIM}")
    if inst.kind == "full":
        gens = [matrix_from_pairs(g) for g in inst.generators]
        if gens and not generates_full_algebra(gens, n, tol):
            raise ParseError(
                f"kind 'full' but the generators do not generate M_{n}", field="generators"
            )
        alg = full_matrix_algebra(n, tol)
    else:
        alg = generate([matrix_from_pairs(g) for g in inst.generators], n, tol)
    log.debug("instance algebra: n=%d, d=%d (%s)", n, alg.dim, inst.kind)

    states: dict[str, PLF] = {}
    for name, spec in sorted(inst.states.items()):
        if isinstance(spec, DensityState):
            states[name] = plf_from_density(alg, matrix_from_pairs(spec.matrix))
        else:
            values = vector_from_pairs(spec.vector)
            if values.shape[0] != alg.dim:
                raise ParseError(
                    f"value vector has {values.shape[0]} entries, algebra has dimension {alg.dim}",
                    field=f"states.{name}.vector",
                )
            states[name] = plf_from_values(alg, values)

    dynamics = None
    if inst.dynamics is not None:
        b = inst.dynamics.beta if beta is None else beta
        dynamics = make_dynamics(alg, matrix_from_pairs(inst.dynamics.hamiltonian), b)
    return LoadedInstance(inst, alg, states, dynamics, tol)
