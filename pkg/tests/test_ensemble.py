import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qtherm.py import console
from qtherm.py.ensemble import (
    COMPLETENESS_TOL,
    QuantumOperation,
    SignalEnsemble,
    align,
    alignment_residual,
    apply,
    average_state,
    cnot_dephasing_parameter,
    dephasing_operation,
    identity_operation,
    output_average,
    reset_operation,
    unitary_operation,
)
from qtherm.py.errors import DimensionError, ValidationError
from qtherm.py.sampling import random_channel, random_density_matrix, random_ensemble, random_unitary


def test_probabilities_must_sum_to_one():
    with pytest.raises(ValidationError, match="probabilities must sum to 1"):
        SignalEnsemble([0.5, 0.4], (np.eye(2) / 2.0, np.eye(2) / 2.0))


def test_ensemble_rejects_mixed_dims_and_negative_weights():
    with pytest.raises(DimensionError):
        SignalEnsemble([0.5, 0.5], (np.eye(2) / 2.0, np.eye(3) / 3.0))
    with pytest.raises(ValidationError, match="non-negative"):
        SignalEnsemble([1.5, -0.5], (np.eye(2) / 2.0, np.eye(2) / 2.0))


def test_zero_weight_signals_are_kept():
    e = SignalEnsemble.from_pairs([(1.0, np.diag([1.0, 0.0])), (0.0, np.diag([0.0, 1.0]))])
    assert len(e) == 2
    assert_allclose(average_state(e), np.diag([1.0, 0.0]))


def test_dephasing_matches_closed_form(rng):
    for r in (0.0, 0.3, 1.0 / math.sqrt(2.0), 1.0):
        q = dephasing_operation(r)
        rho = random_density_matrix(rng, 2)
        expected = r * rho + (1.0 - r) * np.diag(np.diag(rho))
        assert_allclose(apply(q, rho), expected, atol=1e-12)


@pytest.mark.parametrize("r", [-0.1, 1.1, float("nan")])
def test_dephasing_rejects_out_of_range(r):
    with pytest.raises(ValidationError):
        dephasing_operation(r)


def test_kraus_completeness_is_checked():
    with pytest.raises(ValidationError, match="trace preserving"):
        QuantumOperation(kraus=(0.5 * np.eye(2),))
    with pytest.raises(DimensionError):
        QuantumOperation(kraus=(np.eye(2), np.zeros((3, 3))))


def test_operation_dims_and_unitarity(rng):
    assert identity_operation(3).is_unitary()
    assert unitary_operation(random_unitary(rng, 3)).is_unitary()
    assert not dephasing_operation(0.5).is_unitary()
    assert dephasing_operation(1.0).is_unitary()
    rect = random_channel(rng, 2, 3)
    assert (rect.input_dim, rect.output_dim) == (2, 3)
    assert not rect.is_unitary()
    with pytest.raises(ValidationError):
        unitary_operation(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_reset_sends_everything_to_target(rng):
    q = reset_operation(3, target=1)
    out = apply(q, random_density_matrix(rng, 3))
    assert_allclose(out, np.diag([0.0, 1.0, 0.0]), atol=1e-12)
    with pytest.raises(ValidationError):
        reset_operation(2, target=2)


def test_cnot_dephasing_parameter():
    alpha, beta = math.cos(math.pi / 8.0), math.sin(math.pi / 8.0)
    assert cnot_dephasing_parameter(alpha, beta) == pytest.approx(1.0 / math.sqrt(2.0))
    assert cnot_dephasing_parameter(1.0, 0.0) == 0.0
    assert cnot_dephasing_parameter(1 / math.sqrt(2.0), 1j / math.sqrt(2.0)) == pytest.approx(0.0)


def test_case_study_eigenvalues(case_study):
    e, q = case_study
    a = align(e, q)
    assert_allclose(a.lambda_in, [0.880789, 0.119211], atol=1e-6)
    assert_allclose(a.lambda_out, [0.789396, 0.210604], atol=1e-6)
    assert not a.degeneracy_warning


def test_alignment_invariants_on_random_instances(rng):
    for _ in range(50):
        d = int(rng.integers(2, 5))
        e = random_ensemble(rng, d, int(rng.integers(1, 5)))
        q = random_channel(rng, d)
        a = align(e, q)
        assert alignment_residual(a) <= 1e-9
        assert_allclose(a.average_output(), output_average(e, q), atol=1e-10)
        assert_allclose(a.average_input(), average_state(e), atol=1e-10)


def test_alignment_is_invariant_under_relabelling(rng):
    e = random_ensemble(rng, 3, 4)
    q = random_channel(rng, 3)
    a = align(e, q)
    b = align(e.permuted([2, 0, 3, 1]), q)
    assert_allclose(a.lambda_in, b.lambda_in, atol=1e-12)
    assert_allclose(a.lambda_out, b.lambda_out, atol=1e-12)
    assert_allclose(b.mu_out[0], a.mu_out[2], atol=1e-10)


def test_align_rejects_dimension_mismatch(rng):
    e = random_ensemble(rng, 2, 2)
    with pytest.raises(DimensionError):
        align(e, identity_operation(3))


def test_degenerate_average_sets_warning():
    e = SignalEnsemble([0.5, 0.5], (np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
    assert align(e, identity_operation(2)).degeneracy_warning


def test_degeneracy_warning_survives_quiet_mode(capsys):
    console.set_quiet(True)
    e = SignalEnsemble([0.5, 0.5], (np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
    align(e, identity_operation(2))
    assert "[Ensemble] Degenerate spectrum" in capsys.readouterr().err


def test_apply_is_linear_over_the_average(rng):
    for _ in range(20):
        d = int(rng.integers(2, 5))
        e = random_ensemble(rng, d, int(rng.integers(2, 5)))
        q = random_channel(rng, d)
        mixed = sum(p * apply(q, s) for p, s in e.signals)
        assert_allclose(apply(q, average_state(e)), mixed, atol=1e-10)


def test_unitary_channels_keep_the_spectrum(rng):
    for _ in range(20):
        d = int(rng.integers(2, 5))
        e = random_ensemble(rng, d, 3)
        a = align(e, unitary_operation(random_unitary(rng, d)))
        assert_allclose(a.lambda_out, a.lambda_in, atol=1e-9)


def test_kraus_entries_at_nine_digits_are_accepted(case_study):
    e, _ = case_study
    c = 0.707106781
    q = QuantumOperation(kraus=(np.diag([c, c]), np.diag([c, -c])))
    assert 0.0 < q.completeness_error() <= COMPLETENESS_TOL
    out = apply(q, e.states[1])
    assert float(np.trace(out).real) == pytest.approx(1.0, abs=1e-14)
    a = align(e, q)
    assert alignment_residual(a) <= 1e-9
    assert_allclose(a.lambda_out, [0.65, 0.35], atol=1e-6)


def test_probability_drift_is_normalized_away():
    e = SignalEnsemble([0.5 + 4e-11, 0.5 + 4e-11], (np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
    assert float(np.sum(e.probabilities)) == pytest.approx(1.0, abs=1e-15)
    assert float(np.trace(average_state(e)).real) == pytest.approx(1.0, abs=1e-15)
