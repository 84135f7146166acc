import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qtherm.py.errors import SpecError
from qtherm.py.problem_spec import (
    load_problem,
    load_sweep,
    parse_complex,
    parse_operation,
    parse_problem,
    parse_scan,
    parse_state,
    parse_sweep,
)

SQRT_HALF = 1.0 / math.sqrt(2.0)

CASE_STUDY = {
    "ensemble": [
        {"probability": 0.3, "state": {"ket": [1, 0]}},
        {"probability": 0.7, "state": {"bloch": {"theta": math.pi / 2, "phi": 0}}},
    ],
    "operation": {"name": "dephasing", "r": SQRT_HALF},
}


def test_parse_case_study():
    problem = parse_problem(CASE_STUDY)
    assert len(problem.ensemble) == 2
    assert_allclose(problem.ensemble.states[1], np.full((2, 2), 0.5), atol=1e-12)
    assert problem.operation.label.startswith("dephasing")
    assert problem.scan.phase_steps == 720


def test_probabilities_error_names_the_ensemble():
    doc = json.loads(json.dumps(CASE_STUDY))
    doc["ensemble"][1]["probability"] = 0.6
    with pytest.raises(SpecError, match="probabilities must sum to 1") as info:
        parse_problem(doc)
    assert info.value.field == "ensemble"


def test_missing_and_mistyped_fields_are_located():
    doc = json.loads(json.dumps(CASE_STUDY))
    del doc["ensemble"][1]["probability"]
    with pytest.raises(SpecError) as info:
        parse_problem(doc)
    assert info.value.field == "ensemble[1].probability"

    doc = json.loads(json.dumps(CASE_STUDY))
    doc["operation"]["r"] = "strong"
    with pytest.raises(SpecError) as info:
        parse_problem(doc)
    assert info.value.field == "operation.r"


@pytest.mark.parametrize("value, expected", [
    (0.5, 0.5),
    ([0.5, -0.25], 0.5 - 0.25j),
    ("0.5-0.5j", 0.5 - 0.5j),
    (2, 2.0),
])
def test_parse_complex_forms(value, expected):
    assert parse_complex(value, "x") == expected


@pytest.mark.parametrize("value", [True, "half", [1.0], None, float("nan")])
def test_parse_complex_rejects(value):
    with pytest.raises(SpecError):
        parse_complex(value, "x")


def test_state_forms_agree():
    ket = parse_state({"ket": [SQRT_HALF, [0, SQRT_HALF]]}, "s")
    bloch = parse_state({"bloch": {"theta": math.pi / 2, "phi": math.pi / 2}}, "s")
    matrix = parse_state({"matrix": [[0.5, "0-0.5j"], ["0+0.5j", 0.5]]}, "s")
    assert_allclose(ket, bloch, atol=1e-12)
    assert_allclose(ket, matrix, atol=1e-12)
    with pytest.raises(SpecError):
        parse_state({"matrix": [[1.0, 0.0], [0.0, 1.0]]}, "s")
    with pytest.raises(SpecError):
        parse_state({"vector": [1, 0]}, "s")


def test_operation_forms():
    assert parse_operation({"name": "identity", "dim": 3}).input_dim == 3
    assert parse_operation({"name": "reset", "dim": 2, "target": 1}).output_dim == 2
    assert parse_operation({"name": "unitary", "matrix": [[0, 1], [1, 0]]}).is_unitary()
    kraus = parse_operation({"kraus": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]], "label": "measure"})
    assert kraus.label == "measure"
    cnot = parse_operation({"name": "cnot_dephasing", "alpha": math.cos(math.pi / 8), "beta": math.sin(math.pi / 8)})
    assert cnot.input_dim == 2
    with pytest.raises(SpecError, match="unknown operation"):
        parse_operation({"name": "teleport"})
    with pytest.raises(SpecError, match="trace preserving"):
        parse_operation({"kraus": [[[1, 0], [0, 0]]]})


def test_operation_dimension_must_match_ensemble():
    doc = json.loads(json.dumps(CASE_STUDY))
    doc["operation"] = {"name": "identity", "dim": 3}
    with pytest.raises(SpecError) as info:
        parse_problem(doc)
    assert info.value.field == "operation"


def test_scan_overrides():
    cfg = parse_scan({"phase_steps": 90, "radius_step": 1e-3})
    assert (cfg.phase_steps, cfg.radius_step) == (90, 1e-3)
    with pytest.raises(SpecError, match="unknown scan setting"):
        parse_scan({"steps": 10})
    with pytest.raises(SpecError):
        parse_scan({"phase_steps": 1.5})
    with pytest.raises(SpecError):
        parse_scan({"radius_step": 1e-3, "refine_tol": 1e-2})


def test_p_sweep_document():
    sweep = parse_sweep({
        "v1": {"theta": math.pi / 2},
        "v2": {"theta": math.pi / 4},
        "p": {"start": 0, "stop": 1, "steps": 11},
    })
    assert not sweep.is_bloch_scan
    assert len(sweep.p_values) == 11
    assert sweep.p_values[0] == 0.0 and sweep.p_values[-1] == 1.0
    e = sweep.ensemble_at(0.0)
    assert len(e) == 2
    assert sweep.operation.label == "dephasing(0)"


def test_bloch_sweep_document():
    sweep = parse_sweep({
        "v1": {"theta": math.pi / 4, "phi": 0},
        "p": 0.5,
        "grid": {"polar_steps": 4, "azimuth_steps": 8},
    }, require="bloch")
    assert sweep.is_bloch_scan
    grid = sweep.bloch_grid()
    assert len(grid) == 32
    assert grid[0] == (0.0, 0.0)
    assert grid[9] == pytest.approx((math.pi / 4, 2.0 * math.pi / 8))


def test_sweep_kind_is_enforced():
    bloch = {"v1": {"theta": 0}, "p": 0.5, "grid": {"polar_steps": 2, "azimuth_steps": 2}}
    with pytest.raises(SpecError):
        parse_sweep(bloch, require="p")
    with pytest.raises(SpecError) as info:
        parse_sweep({"v1": {"theta": 0}, "v2": {"theta": 1}, "p": {"start": 0, "stop": 1.5, "steps": 3}})
    assert info.value.field == "p.stop"
    with pytest.raises(SpecError):
        parse_sweep({"v1": {"theta": 0}, "v2": {"theta": 1}, "p": {"start": 0, "stop": 1, "steps": 0}})


def test_load_from_files(tmp_path):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(CASE_STUDY), encoding="utf-8")
    assert len(load_problem(str(path)).ensemble) == 2
    sweep_path = tmp_path / "sweep.json"
    sweep_path.write_text(json.dumps({"v1": {"theta": 0}, "v2": {"theta": 1},
                                      "p": {"start": 0.2, "stop": 0.2, "steps": 1}}), encoding="utf-8")
    assert load_sweep(str(sweep_path), require="p").p_values == (0.2,)
