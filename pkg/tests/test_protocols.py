import math

import numpy as np
import pytest

from qtherm.py.ensemble import align, reset_operation
from qtherm.py.errors import ContractError, DimensionError, SupportError
from qtherm.py.protocols import special_case_protocol_ledger, standard_protocol_ledger
from qtherm.py.qmat import entropy
from qtherm.py.reversibility import classify
from qtherm.py.sampling import (
    measure_prepare_operation,
    random_channel,
    random_classical_ensemble,
    random_density_matrix,
    random_ensemble,
    random_unitary,
)

LN2 = math.log(2.0)


def test_standard_ledger_total_is_landauer(rng):
    for _ in range(50):
        d = int(rng.integers(2, 5))
        rho = random_density_matrix(rng, d)
        rho_prime = random_density_matrix(rng, d)
        ledger = standard_protocol_ledger(rho, rho_prime)
        assert ledger.total_kT == pytest.approx(LN2 * (entropy(rho) - entropy(rho_prime)), abs=1e-9)
        assert len(ledger.steps) == 6


def test_standard_ledger_is_gauge_invariant(rng):
    rho = random_density_matrix(rng, 3)
    rho_prime = random_density_matrix(rng, 3)
    base = standard_protocol_ledger(rho, rho_prime).total_kT
    shifted = standard_protocol_ledger(rho, rho_prime, offset_in=2.5, offset_out=-1.25)
    assert shifted.total_kT == pytest.approx(base, abs=1e-9)
    assert shifted.energies() != standard_protocol_ledger(rho, rho_prime).energies()


def test_standard_ledger_needs_full_support():
    with pytest.raises(SupportError):
        standard_protocol_ledger(np.diag([1.0, 0.0]), np.eye(2) / 2.0)
    with pytest.raises(DimensionError):
        standard_protocol_ledger(np.eye(2) / 2.0, np.eye(3) / 3.0)


def test_special_case_ledger_for_classical_instances(rng):
    for _ in range(20):
        d = int(rng.integers(2, 5))
        basis = random_unitary(rng, d)
        a = align(random_classical_ensemble(rng, d, basis=basis), measure_prepare_operation(rng, basis))
        verdict = classify(a)
        ledger = special_case_protocol_ledger(a, verdict.stochastic_map)
        expected = LN2 * (entropy(a.average_input()) - entropy(a.average_output()))
        assert ledger.total_kT == pytest.approx(expected, abs=1e-9)


def test_special_case_ledger_for_reset(rng):
    e = random_ensemble(rng, 3, 2)
    a = align(e, reset_operation(3))
    ledger = special_case_protocol_ledger(a, classify(a).stochastic_map)
    # Output is pure, so the whole input entropy is released.
    assert ledger.total_kT == pytest.approx(LN2 * entropy(a.average_input()), abs=1e-9)
    doc = ledger.to_dict()
    assert doc["units"] == "kT"
    assert [s["label"] for s in doc["steps"]][0].startswith("correlate")


def test_special_case_ledger_refuses_a_wrong_map(rng):
    e = random_ensemble(rng, 2, 2)
    a = align(e, reset_operation(2))
    with pytest.raises(ContractError):
        special_case_protocol_ledger(a, np.full((2, 2), 0.5))
    with pytest.raises(DimensionError):
        special_case_protocol_ledger(a, np.full((3, 2), 1.0 / 3.0))


def test_special_case_ledger_for_a_single_input(rng):
    for _ in range(10):
        d = int(rng.integers(2, 5))
        e = random_ensemble(rng, d, 1)
        a = align(e, random_channel(rng, d))
        constant_map = np.tile(a.lambda_out[:, None], (1, d))
        ledger = special_case_protocol_ledger(a, constant_map)
        expected = LN2 * (entropy(a.average_input()) - entropy(a.average_output()))
        assert ledger.total_kT == pytest.approx(expected, abs=1e-9)
