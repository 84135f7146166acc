"""
Seeded numerical verification suite.

Each check draws random instances from one numpy Generator, evaluates a
residual or slack per trial and compares the worst value with its tolerance.
A trial that raises a QThermError counts as a failure and the first message is
kept in the summary. `corrupt_unitary=True` swaps the reset-satisfying
implementations for ones whose auxiliary no longer resets (negative control).
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import partial

import numpy as np

from .console import fail, ok, progress
from .ensemble import SignalEnsemble, align, alignment_residual, reset_operation
from .errors import ContractError, QThermError, ValidationError
from .protocols import special_case_protocol_ledger, standard_protocol_ledger
from .qmat import entropy, relative_entropy, trace_norm
from .reversibility import VerdictKind, classify
from .sampling import (
    measure_prepare_operation,
    random_channel,
    random_classical_ensemble,
    random_density_matrix,
    random_ensemble,
    random_unitary,
)
from .settings import get_setting
from .simulator import (
    HeatBath,
    cnot_dephasing_impl,
    extract_q,
    ncopy_demo,
    proof_operators,
    random_reset_impl,
    verify_excess_bound,
    verify_lemma1,
    verify_lemma2,
    verify_lemma3,
)

LN2 = math.log(2.0)
CORRUPTION_ANGLE = 0.3


@dataclass(frozen=True)
class CheckResult:
    name: str
    trials: int
    worst: float
    tolerance: float
    mode: str  # "max": worst residual must stay <= tolerance; "min": worst slack must stay >= tolerance
    failures: int
    elapsed_s: float
    note: str = ""

    @property
    def passed(self):
        if self.failures:
            return False
        if self.mode == "max":
            return self.worst <= self.tolerance
        return self.worst >= self.tolerance

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "trials": self.trials,
            "worst": _finite_or_none(self.worst),
            "tolerance": self.tolerance,
            "mode": self.mode,
            "failures": self.failures,
            "elapsed_s": round(self.elapsed_s, 4),
            "note": self.note,
        }


def _finite_or_none(x):
    return float(x) if math.isfinite(x) else None


# =============================================================================
# Instance builders
# =============================================================================

def _dim(rng, low=2, high=4):
    return int(rng.integers(low, high + 1))


def _random_cnot(rng):
    angle = rng.uniform(0.0, math.pi / 2.0)
    return cnot_dephasing_impl(math.cos(angle), math.sin(angle), bath_dim=int(rng.integers(2, 5)))


def _reset_impl(rng, corrupt):
    if corrupt:
        # r = 1/sqrt(2): the auxiliary has a coherence the rotation destroys.
        return cnot_dephasing_impl(math.cos(math.pi / 8), math.sin(math.pi / 8)).corrupted(CORRUPTION_ANGLE)
    if rng.random() < 0.5:
        return _random_cnot(rng)
    return random_reset_impl(rng, system_dim=_dim(rng, 2, 3), bath_dim=_dim(rng, 2, 3))


def _implementation_instance(rng, impl):
    e = random_ensemble(rng, impl.system_dim, int(rng.integers(1, 4)), pure=bool(rng.random() < 0.5))
    return e, align(e, impl.channel())


# =============================================================================
# Trials
# =============================================================================

def _pinsker_trial(rng):
    d = _dim(rng)
    rho = random_density_matrix(rng, d)
    sigma = random_density_matrix(rng, d)
    return relative_entropy(rho, sigma) - trace_norm(rho - sigma) ** 2 / (2.0 * LN2)


def _alignment_trial(rng):
    d = _dim(rng)
    e = random_ensemble(rng, d, int(rng.integers(1, 5)))
    return alignment_residual(align(e, random_channel(rng, d)))


def _reversible_residual(e, q):
    verdict = classify(align(e, q))
    if verdict.kind is not VerdictKind.REVERSIBLE:
        raise ContractError(f"expected a reversible verdict for {q.label}, got {verdict.kind.value}")
    return verdict.stochastic_map.residual


def _special_cases_trial(rng):
    d = _dim(rng)
    single = SignalEnsemble([1.0], (random_density_matrix(rng, d),))
    basis = random_unitary(rng, d)
    classical = random_classical_ensemble(rng, d, basis=basis)
    return max(
        _reversible_residual(single, random_channel(rng, d)),
        _reversible_residual(random_ensemble(rng, d, int(rng.integers(1, 5))), reset_operation(d)),
        _reversible_residual(classical, measure_prepare_operation(rng, basis)),
    )


def _energy_identity_trial(rng, corrupt=False):
    impl = _reset_impl(rng, corrupt)
    e = random_ensemble(rng, impl.system_dim, int(rng.integers(1, 4)))
    return verify_lemma1(impl, e)


def _excess_bound_trial(rng, corrupt=False):
    impl = _reset_impl(rng, corrupt)
    e = random_ensemble(rng, impl.system_dim, int(rng.integers(1, 4)))
    return verify_excess_bound(impl, e)


def _coefficient_trial(rng):
    impl = _reset_impl(rng, False)
    _, a = _implementation_instance(rng, impl)
    return extract_q(impl, a).worst_residual


def _trace_norm_trial(rng):
    impl = _random_cnot(rng)
    _, a = _implementation_instance(rng, impl)
    return min(verify_lemma3(impl, a), verify_lemma2(impl, a))


def _proof_operator_trial(rng):
    impl = _reset_impl(rng, False)
    _, a = _implementation_instance(rng, impl)
    ops = proof_operators(impl, a)
    return max(ops.unitarity_residual(), ops.identity_residual())


def _ledger_trial(rng):
    d = _dim(rng)
    rho = random_density_matrix(rng, d)
    rho_prime = random_density_matrix(rng, d)
    landauer = LN2 * (entropy(rho) - entropy(rho_prime))
    standard = abs(standard_protocol_ledger(rho, rho_prime).total_kT - landauer)

    basis = random_unitary(rng, d)
    e = random_classical_ensemble(rng, d, basis=basis)
    a = align(e, measure_prepare_operation(rng, basis))
    verdict = classify(a)
    if verdict.kind is not VerdictKind.REVERSIBLE:
        raise ContractError(f"classical instance classified {verdict.kind.value}")
    special_landauer = LN2 * (entropy(a.average_input()) - entropy(a.average_output()))
    special = abs(special_case_protocol_ledger(a, verdict.stochastic_map).total_kT - special_landauer)
    return max(standard, special)


def _ncopy_trial(rng):
    bath = HeatBath.equally_spaced(int(rng.integers(2, 5)))
    g = rng.standard_normal((bath.dim, bath.dim)) + 1j * rng.standard_normal((bath.dim, bath.dim))
    delta = g + g.conj().T
    delta = delta - np.trace(delta).real / bath.dim * np.eye(bath.dim)
    # Keep rho_B + delta valid for n = 1.
    delta = delta * (0.5 * bath.populations.min() / np.max(np.abs(np.linalg.eigvalsh(delta))))
    e1, s1 = ncopy_demo(bath, delta, 1)
    e100, s100 = ncopy_demo(bath, delta, 100)
    if s100 * 50.0 > s1:
        raise ContractError(f"relative entropy fell only {s1 / s100:.3g}x between n=1 and n=100")
    return abs(e1 - e100)


# name, base trials, trial, mode, tolerance
CHECKS = (
    ("pinsker", 1000, _pinsker_trial, "min", -1e-9),
    ("alignment_invariants", 1000, _alignment_trial, "max", 1e-9),
    ("special_case_identities", 500, _special_cases_trial, "max", 1e-8),
    ("bath_energy_identity", 50, _energy_identity_trial, "max", 1e-7),
    ("excess_bound", 50, _excess_bound_trial, "min", -1e-7),
    ("coefficient_map", 50, _coefficient_trial, "max", 1e-8),
    ("trace_norm_bounds", 100, _trace_norm_trial, "min", -1e-8),
    ("proof_operators", 20, _proof_operator_trial, "max", 1e-8),
    ("protocol_ledgers", 200, _ledger_trial, "max", 1e-9),
    ("ncopy_bath", 10, _ncopy_trial, "max", 1e-12),
)

_CORRUPTIBLE = {"bath_energy_identity", "excess_bound"}


def _run_check(name, trials, trial, mode, tolerance, rng):
    worst = -math.inf if mode == "max" else math.inf
    failures = 0
    note = ""
    start = time.perf_counter()
    for _ in progress(range(trials), desc=name, enabled=get_setting("show_progress")):
        try:
            value = float(trial(rng))
        except QThermError as e:
            failures += 1
            note = note or str(e)
            continue
        if math.isnan(value):
            failures += 1
            note = note or "trial produced NaN"
            continue
        worst = max(worst, value) if mode == "max" else min(worst, value)
    elapsed = time.perf_counter() - start
    return CheckResult(name=name, trials=trials, worst=worst, tolerance=tolerance, mode=mode,
                       failures=failures, elapsed_s=elapsed, note=note)


def run_verification(seed=0, trials_scale=1.0, corrupt_unitary=False, only=None):
    """Run every check (or those named in `only`) and return a JSON-ready summary."""
    if not trials_scale > 0:
        raise ValidationError(f"trials_scale must be positive, got {trials_scale}")
    rng = np.random.default_rng(seed)
    results = []
    start = time.perf_counter()
    for name, base, trial, mode, tolerance in CHECKS:
        if only and name not in only:
            continue
        if corrupt_unitary and name in _CORRUPTIBLE:
            trial = partial(trial, corrupt=True)
        trials = max(1, int(round(base * trials_scale)))
        result = _run_check(name, trials, trial, mode, tolerance, rng)
        if result.passed:
            ok("Verify", f"{name}: worst {result.worst:.3e} over {trials} trials ({result.elapsed_s:.2f}s)")
        else:
            fail("Verify", f"{name}: FAILED (worst {result.worst:.3e}, tolerance {tolerance:g}, "
                           f"{result.failures} failing trials) {result.note}")
        results.append(result)

    return {
        "seed": seed,
        "trials_scale": trials_scale,
        "corrupt_unitary": corrupt_unitary,
        "passed": all(r.passed for r in results),
        "elapsed_s": round(time.perf_counter() - start, 4),
        "checks": [r.to_dict() for r in results],
    }
