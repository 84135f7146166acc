"""
Problem and sweep documents.

A problem document describes one ensemble, one operation and optional scan
overrides:

    {
      "ensemble": [
        {"probability": 0.3, "state": {"bloch": {"theta": 0, "phi": 0}}},
        {"probability": 0.7, "state": {"ket": [0.7071067811865476, 0.7071067811865476]}}
      ],
      "operation": {"name": "dephasing", "r": 0.7071067811865476},
      "scan": {"phase_steps": 720}
    }

A sweep document fixes two qubit pure states v1, v2 (Bloch angles) and a
p-grid, or fixes v1 and p and scans v2 over a Bloch grid. Every parse error is
a SpecError naming the offending field, e.g. "ensemble[1].probability".
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .bounds import ScanConfig
from .ensemble import (
    QuantumOperation,
    SignalEnsemble,
    dephasing_operation,
    identity_operation,
    reset_operation,
    unitary_operation,
)
from .errors import SpecError, ValidationError
from .qmat import as_density_matrix, bloch_ket, ket_to_density
from .report_store import load_json_document
from .simulator import cnot_dephasing_impl

OPERATION_NAMES = ("dephasing", "cnot_dephasing", "identity", "reset", "unitary")
DEFAULT_SWEEP_OPERATION = {"name": "dephasing", "r": 0.0}


# =============================================================================
# Scalars and matrices
# =============================================================================

def _require(doc, key, path):
    if not isinstance(doc, dict):
        raise SpecError(path, f"expected an object, got {type(doc).__name__}")
    if key not in doc:
        raise SpecError(f"{path}.{key}" if path else key, "missing")
    return doc[key]


def parse_real(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(path, f"expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise SpecError(path, "must be finite")
    return value


def parse_count(value, path):
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        raise SpecError(path, f"expected a positive integer, got {value!r}")
    return value


def parse_complex(value, path):
    """A number, an [re, im] pair, or a string such as "0.5-0.5j"."""
    if isinstance(value, bool):
        raise SpecError(path, f"expected a complex number, got {value!r}")
    if isinstance(value, (int, float)):
        return complex(parse_real(value, path))
    if isinstance(value, list) and len(value) == 2:
        return complex(parse_real(value[0], f"{path}[0]"), parse_real(value[1], f"{path}[1]"))
    if isinstance(value, str):
        try:
            z = complex(value.replace(" ", ""))
        except ValueError:
            raise SpecError(path, f"cannot parse {value!r} as a complex number") from None
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise SpecError(path, "must be finite")
        return z
    raise SpecError(path, f"expected a complex number, got {value!r}")


def parse_vector(value, path):
    if not isinstance(value, list) or not value:
        raise SpecError(path, "expected a non-empty list")
    return np.array([parse_complex(x, f"{path}[{i}]") for i, x in enumerate(value)], dtype=complex)


def parse_matrix(value, path):
    if not isinstance(value, list) or not value or not all(isinstance(row, list) for row in value):
        raise SpecError(path, "expected a non-empty list of rows")
    width = len(value[0])
    for r, row in enumerate(value):
        if len(row) != width:
            raise SpecError(f"{path}[{r}]", f"row has {len(row)} entries, expected {width}")
    return np.array([[parse_complex(x, f"{path}[{r}][{c}]") for c, x in enumerate(row)]
                     for r, row in enumerate(value)], dtype=complex)


# =============================================================================
# States, ensembles, operations
# =============================================================================

def parse_bloch(doc, path):
    theta = parse_real(_require(doc, "theta", path), f"{path}.theta")
    phi = parse_real(doc.get("phi", 0.0), f"{path}.phi")
    return bloch_ket(theta, phi)


def parse_state(doc, path):
    if not isinstance(doc, dict):
        raise SpecError(path, "expected an object with 'bloch', 'ket' or 'matrix'")
    try:
        if "bloch" in doc:
            return ket_to_density(parse_bloch(doc["bloch"], f"{path}.bloch"))
        if "ket" in doc:
            return ket_to_density(parse_vector(doc["ket"], f"{path}.ket"))
        if "matrix" in doc:
            return as_density_matrix(parse_matrix(doc["matrix"], f"{path}.matrix"), path)
    except SpecError:
        raise
    except ValidationError as e:
        raise SpecError(path, str(e)) from e
    raise SpecError(path, "expected one of 'bloch', 'ket' or 'matrix'")


def parse_ensemble(items, path="ensemble"):
    if not isinstance(items, list) or not items:
        raise SpecError(path, "expected a non-empty list of signals")
    probabilities, states = [], []
    for n, item in enumerate(items):
        entry = f"{path}[{n}]"
        probabilities.append(parse_real(_require(item, "probability", entry), f"{entry}.probability"))
        states.append(parse_state(_require(item, "state", entry), f"{entry}.state"))
    try:
        return SignalEnsemble(probabilities=probabilities, states=tuple(states))
    except ValidationError as e:
        raise SpecError(path, str(e)) from e


def parse_operation(doc, path="operation"):
    if not isinstance(doc, dict):
        raise SpecError(path, "expected an object")
    try:
        if "kraus" in doc:
            ops = doc["kraus"]
            if not isinstance(ops, list) or not ops:
                raise SpecError(f"{path}.kraus", "expected a non-empty list of matrices")
            kraus = tuple(parse_matrix(k, f"{path}.kraus[{i}]") for i, k in enumerate(ops))
            return QuantumOperation(kraus=kraus, label=str(doc.get("label", "kraus")))

        name = _require(doc, "name", path)
        if name == "dephasing":
            return dephasing_operation(parse_real(_require(doc, "r", path), f"{path}.r"))
        if name == "cnot_dephasing":
            alpha = parse_complex(_require(doc, "alpha", path), f"{path}.alpha")
            beta = parse_complex(_require(doc, "beta", path), f"{path}.beta")
            return cnot_dephasing_impl(alpha, beta, bath_dim=1).channel()
        if name == "identity":
            return identity_operation(parse_count(_require(doc, "dim", path), f"{path}.dim"))
        if name == "reset":
            dim = parse_count(_require(doc, "dim", path), f"{path}.dim")
            target = doc.get("target", 0)
            if isinstance(target, bool) or not isinstance(target, int):
                raise SpecError(f"{path}.target", f"expected an integer, got {target!r}")
            return reset_operation(dim, target)
        if name == "unitary":
            return unitary_operation(parse_matrix(_require(doc, "matrix", path), f"{path}.matrix"))
    except SpecError:
        raise
    except ValidationError as e:
        raise SpecError(path, str(e)) from e
    raise SpecError(f"{path}.name", f"unknown operation {name!r}; expected one of {', '.join(OPERATION_NAMES)}")


def parse_scan(doc, path="scan"):
    if doc is None:
        return ScanConfig()
    if not isinstance(doc, dict):
        raise SpecError(path, "expected an object")
    known = {f.name for f in fields(ScanConfig)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise SpecError(f"{path}.{unknown[0]}", f"unknown scan setting; expected one of {', '.join(sorted(known))}")
    overrides = {}
    for key, value in doc.items():
        if key == "phase_steps":
            overrides[key] = parse_count(value, f"{path}.{key}")
        else:
            overrides[key] = parse_real(value, f"{path}.{key}")
    try:
        return ScanConfig(**overrides)
    except ValidationError as e:
        raise SpecError(path, str(e)) from e


# =============================================================================
# Documents
# =============================================================================

@dataclass(frozen=True)
class ProblemSpec:
    ensemble: SignalEnsemble
    operation: QuantumOperation
    scan: ScanConfig


def parse_problem(doc):
    if not isinstance(doc, dict):
        raise SpecError("", "problem document must be a JSON object")
    ensemble = parse_ensemble(_require(doc, "ensemble", ""))
    operation = parse_operation(_require(doc, "operation", ""))
    if operation.input_dim != ensemble.dim:
        raise SpecError("operation", f"acts on dim {operation.input_dim}, ensemble has dim {ensemble.dim}")
    return ProblemSpec(ensemble=ensemble, operation=operation, scan=parse_scan(doc.get("scan")))


def load_problem(path):
    return parse_problem(load_json_document(path))


def _probability(value, path):
    p = parse_real(value, path)
    if p < 0.0 or p > 1.0:
        raise SpecError(path, f"must lie in [0, 1], got {p}")
    return p


@dataclass(frozen=True)
class SweepSpec:
    """Either a p-sweep (v1, v2, p_values) or a Bloch scan (v1, p, polar/azimuth steps)."""
    v1: np.ndarray
    operation: QuantumOperation
    scan: ScanConfig
    v2: np.ndarray | None = None
    p_values: tuple = ()
    p: float | None = None
    polar_steps: int = 0
    azimuth_steps: int = 0

    @property
    def is_bloch_scan(self):
        return self.v2 is None

    def ensemble_at(self, p, v2=None):
        """{(p, v1), (1 - p, v2)}; zero-weight signals stay in the ensemble."""
        v2 = self.v2 if v2 is None else v2
        return SignalEnsemble(
            probabilities=[p, 1.0 - p],
            states=(ket_to_density(self.v1), ket_to_density(v2)),
        )

    def bloch_grid(self):
        """(theta_i, phi_j) with theta_i = pi i / polar_steps, phi_j = 2 pi j / azimuth_steps."""
        return [
            (math.pi * i / self.polar_steps, 2.0 * math.pi * j / self.azimuth_steps)
            for i in range(self.polar_steps)
            for j in range(self.azimuth_steps)
        ]


def parse_sweep(doc, require=None):
    """`require` is "p" or "bloch" to insist on one sweep kind."""
    if not isinstance(doc, dict):
        raise SpecError("", "sweep document must be a JSON object")
    v1 = parse_bloch(_require(doc, "v1", ""), "v1")
    operation = parse_operation(doc.get("operation", DEFAULT_SWEEP_OPERATION))
    if operation.input_dim != 2:
        raise SpecError("operation", f"sweeps need a qubit operation, got input dim {operation.input_dim}")
    scan = parse_scan(doc.get("scan"))

    if "grid" in doc:
        if require == "p":
            raise SpecError("grid", "this command needs a p-grid sweep ('v2' and 'p': {start, stop, steps})")
        grid = doc["grid"]
        polar = parse_count(_require(grid, "polar_steps", "grid"), "grid.polar_steps")
        azimuth = parse_count(_require(grid, "azimuth_steps", "grid"), "grid.azimuth_steps")
        p = _probability(_require(doc, "p", ""), "p")
        return SweepSpec(v1=v1, operation=operation, scan=scan, p=p, polar_steps=polar, azimuth_steps=azimuth)

    if require == "bloch":
        raise SpecError("grid", "missing; this command needs a Bloch grid {polar_steps, azimuth_steps}")
    v2 = parse_bloch(_require(doc, "v2", ""), "v2")
    p_doc = _require(doc, "p", "")
    start = _probability(_require(p_doc, "start", "p"), "p.start")
    stop = _probability(_require(p_doc, "stop", "p"), "p.stop")
    steps = parse_count(_require(p_doc, "steps", "p"), "p.steps")
    values = tuple(float(x) for x in np.linspace(start, stop, steps))
    return SweepSpec(v1=v1, v2=v2, operation=operation, scan=scan, p_values=values)


def load_sweep(path, require=None):
    return parse_sweep(load_json_document(path), require=require)
