"""Tests for instance-file parsing, serialization and materialization."""

from __future__ import annotations

import json

import numpy as np
import pytest

from nclebesgue.core.exceptions import MissingDynamics, ParseError, TooLarge, UnknownState
from nclebesgue.core.instance import (
    MAX_AMBIENT_DIM,
    build_instance,
    dump_instance,
    instance_tolerance,
    load_instance,
    matrix_from_pairs,
    matrix_to_pairs,
    parse_instance,
)
from nclebesgue.linalg.numerics import DEFAULT_TOLERANCE

from _helpers import FIXTURES, load_fixture, write_instance


def _minimal(**overrides) -> dict:
    data = {
        "ambient_dim": 2,
        "kind": "full",
        "states": {
            "lambda": {"type": "density", "matrix": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]},
        },
    }
    data.update(overrides)
    return data


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def test_fixtures_parse():
    for path in sorted(FIXTURES.glob("*.json")):
        inst = load_instance(path)
        assert inst.ambient_dim >= 1
        assert "lambda" in inst.states


def test_dump_is_deterministic():
    inst = load_fixture("m2_pair.json")
    text = dump_instance(inst)
    assert text.endswith("\n")
    assert text == dump_instance(parse_instance(text))
    keys = list(json.loads(text))
    assert keys == sorted(keys)


def test_matrix_pairs_conversion():
    m = np.array([[1 + 2j, 0], [0.5, -1j]])
    assert np.array_equal(matrix_from_pairs(matrix_to_pairs(m)), m)


def test_invalid_json_reports_line():
    with pytest.raises(ParseError) as exc_info:
        parse_instance('{\n  "ambient_dim": 2,\n  oops\n}')
    assert exc_info.value.line == 3


def test_schema_error_reports_field():
    with pytest.raises(ParseError) as exc_info:
        parse_instance(json.dumps(_minimal(ambient_dim=0)))
    assert exc_info.value.field == "ambient_dim"


def test_unknown_top_level_key_rejected():
    with pytest.raises(ParseError) as exc_info:
        parse_instance(json.dumps(_minimal(extra=1)))
    assert exc_info.value.field == "extra"


def test_unknown_state_type_rejected():
    data = _minimal(states={"lambda": {"type": "wavefunction", "vector": []}})
    with pytest.raises(ParseError) as exc_info:
        parse_instance(json.dumps(data))
    assert exc_info.value.field.startswith("states.lambda")


def test_wrong_matrix_shape_names_field():
    data = _minimal(states={"lambda": {"type": "density", "matrix": [[[1, 0]]]}})
    with pytest.raises(ParseError) as exc_info:
        parse_instance(json.dumps(data))
    assert exc_info.value.field == "states.lambda.matrix"


def test_wrong_hamiltonian_shape_names_field():
    data = _minimal(dynamics={"hamiltonian": [[[0, 0]]], "beta": 1.0})
    with pytest.raises(ParseError) as exc_info:
        parse_instance(json.dumps(data))
    assert exc_info.value.field == "dynamics.hamiltonian"


def test_negative_beta_rejected():
    data = _minimal(dynamics={"hamiltonian": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]], "beta": -1.0})
    with pytest.raises(ParseError):
        parse_instance(json.dumps(data))


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_instance(tmp_path / "missing.json")


# ---------------------------------------------------------------------------
# Materialization
# ---------------------------------------------------------------------------


def test_build_m2_pair(m2_instance):
    assert m2_instance.algebra.dim == 4
    assert set(m2_instance.states) == {"lambda", "mu", "pure"}
    assert m2_instance.dynamics is not None
    assert np.allclose(m2_instance.state("mu").density, [[0.5, 0.25], [0.25, 0.5]])


def test_build_classical(classical_instance):
    assert classical_instance.algebra.dim == 3
    assert classical_instance.dynamics is None


def test_unknown_state_lists_available(m2_instance):
    with pytest.raises(UnknownState, match="lambda, mu, pure"):
        m2_instance.state("nope")


def test_missing_dynamics(classical_instance):
    with pytest.raises(MissingDynamics):
        classical_instance.require_dynamics()


def test_beta_override(m2_instance):
    assert m2_instance.require_dynamics(0.5).beta == 0.5
    assert m2_instance.require_dynamics().beta == pytest.approx(np.log(3.0))


def test_too_large(tmp_path):
    n = MAX_AMBIENT_DIM + 1
    inst = parse_instance(json.dumps({"ambient_dim": n, "kind": "full"}))
    with pytest.raises(TooLarge):
        build_instance(inst, DEFAULT_TOLERANCE)


def test_values_state_round_trip():
    """A value vector on the diagonal algebra gives back the same functional."""
    data = {
        "ambient_dim": 2,
        "generators": [[[[1, 0], [0, 0]], [[0, 0], [2, 0]]]],
        "states": {"lambda": {"type": "values", "vector": [[np.sqrt(2) / 2, 0], [0, 0]]}},
    }
    loaded = build_instance(parse_instance(json.dumps(data)), DEFAULT_TOLERANCE)
    lam = loaded.state("lambda")
    assert lam.norm == pytest.approx(np.sqrt(2) / 2)


def test_values_state_wrong_length():
    data = {
        "ambient_dim": 2,
        "generators": [[[[1, 0], [0, 0]], [[0, 0], [2, 0]]]],
        "states": {"lambda": {"type": "values", "vector": [[1, 0], [0, 0], [0, 0]]}},
    }
    with pytest.raises(ParseError) as exc_info:
        build_instance(parse_instance(json.dumps(data)), DEFAULT_TOLERANCE)
    assert exc_info.value.field == "states.lambda.vector"


def test_full_kind_checks_generators():
    data = _minimal(generators=[[[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]])
    with pytest.raises(ParseError) as exc_info:
        build_instance(parse_instance(json.dumps(data)), DEFAULT_TOLERANCE)
    assert exc_info.value.field == "generators"


def test_full_kind_accepts_generating_set():
    x = [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]
    z = [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]
    inst = parse_instance(json.dumps(_minimal(generators=[x, z])))
    loaded = build_instance(inst, DEFAULT_TOLERANCE)
    assert loaded.algebra.dim == 4


def test_full_kind_without_generators():
    loaded = build_instance(parse_instance(json.dumps(_minimal())), DEFAULT_TOLERANCE)
    assert loaded.algebra.dim == 4


def test_spinchain_fixture_generators_are_full():
    loaded = build_instance(load_fixture("spinchain_l2.json"), DEFAULT_TOLERANCE)
    assert loaded.algebra.dim == 16


def test_instance_tolerance_override():
    inst = parse_instance(json.dumps(_minimal(tolerance={"eq_abs": 1e-6})))
    tol = instance_tolerance(inst, DEFAULT_TOLERANCE)
    assert tol.eq_abs == 1e-6
    assert tol.rank_rel == DEFAULT_TOLERANCE.rank_rel


def test_instance_tolerance_absent():
    inst = parse_instance(json.dumps(_minimal()))
    assert instance_tolerance(inst, DEFAULT_TOLERANCE) is DEFAULT_TOLERANCE


def test_written_instance_loads(tmp_path):
    path = write_instance(tmp_path, _minimal())
    assert load_instance(path).kind == "full"
