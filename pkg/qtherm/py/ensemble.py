"""
Signal ensembles, quantum operations, and the aligned coefficient form.

A SignalEnsemble is a list of (probability, density matrix) pairs. A
QuantumOperation is a list of Kraus operators with sum K^dagger K = I. align()
diagonalizes the average input and the average output separately and rewrites
every signal (and its image) in those bases; the resulting mu / mu' matrices
are what the reversibility test and the bounds work on.
Used by: reversibility, bounds, simulator, problem_spec
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .console import warn
from .errors import DimensionError, ValidationError
from .qmat import (
    as_density_matrix,
    as_matrix,
    eig_hermitian,
    hermitian_part,
    unitarity_error,
)

PROBABILITY_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
UNITARY_TOL = 1e-9
ALIGNMENT_TOL = 1e-9


# =============================================================================
# Signal ensembles
# =============================================================================

@dataclass(frozen=True)
class SignalEnsemble:
    """Probabilistic mixture of input states, all of the same dimension."""
    probabilities: np.ndarray
    states: tuple

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=float).reshape(-1)
        states = tuple(self.states)
        if len(states) == 0:
            raise ValidationError("ensemble needs at least one signal")
        if probs.shape[0] != len(states):
            raise ValidationError(f"got {probs.shape[0]} probabilities for {len(states)} states")
        if not np.all(np.isfinite(probs)):
            raise ValidationError("probabilities must be finite")
        if np.any(probs < 0.0):
            raise ValidationError("probabilities must be non-negative")
        total = float(np.sum(probs))
        if abs(total - 1.0) > PROBABILITY_TOL:
            raise ValidationError(f"probabilities must sum to 1 (got {total:.12g})")

        checked = tuple(unit_trace(as_density_matrix(s, name=f"signal {n}")) for n, s in enumerate(states))
        dim = checked[0].shape[0]
        for n, s in enumerate(checked):
            if s.shape[0] != dim:
                raise DimensionError(f"signal {n} has dim {s.shape[0]}, expected {dim}")

        object.__setattr__(self, "probabilities", probs / total)
        object.__setattr__(self, "states", checked)

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        return cls(probabilities=[p for p, _ in pairs], states=tuple(s for _, s in pairs))

    @property
    def signals(self):
        return list(zip(self.probabilities.tolist(), self.states))

    @property
    def dim(self):
        return int(self.states[0].shape[0])

    def __len__(self):
        return len(self.states)

    def permuted(self, order):
        """The same ensemble with signals relabelled in `order`."""
        order = list(order)
        return SignalEnsemble(self.probabilities[order], tuple(self.states[n] for n in order))


def unit_trace(m):
    """m rescaled to trace one; absorbs the drift that input tolerances allow."""
    return m / float(np.trace(m).real)


def _mix(probabilities, states):
    rho = np.zeros_like(states[0])
    for p, s in zip(probabilities, states):
        rho = rho + p * s
    return unit_trace(rho)


def average_state(e):
    """rho_S = sum_n p_n rho^n."""
    return _mix(e.probabilities, e.states)


# =============================================================================
# Quantum operations
# =============================================================================

@dataclass(frozen=True)
class QuantumOperation:
    """CPTP map in Kraus form; each Kraus operator is dim_out x dim_in."""
    kraus: tuple
    label: str = ""

    def __post_init__(self):
        ops = tuple(as_matrix(k, name=f"Kraus operator {i}") for i, k in enumerate(self.kraus))
        if not ops:
            raise ValidationError("operation needs at least one Kraus operator")
        shape = ops[0].shape
        for i, k in enumerate(ops):
            if k.shape != shape:
                raise DimensionError(f"Kraus operator {i} has shape {k.shape}, expected {shape}")
        object.__setattr__(self, "kraus", ops)

        err = self.completeness_error()
        if err > COMPLETENESS_TOL:
            raise ValidationError(f"Kraus operators are not trace preserving (max |sum K^H K - I| = {err:.3e})")

    @property
    def input_dim(self):
        return int(self.kraus[0].shape[1])

    @property
    def output_dim(self):
        return int(self.kraus[0].shape[0])

    def completeness_error(self):
        total = sum(k.conj().T @ k for k in self.kraus)
        return float(np.max(np.abs(total - np.eye(self.input_dim))))

    def is_unitary(self):
        if self.input_dim != self.output_dim:
            return False
        # A single unitary up to Kraus redundancy: the Choi rank is one.
        stacked = np.stack([k.reshape(-1) for k in self.kraus])
        sv = np.linalg.svd(stacked, compute_uv=False)
        return bool(sv.size == 1 or sv[1] <= 1e-9 * max(sv[0], 1.0))


def apply(q, rho):
    """Q(rho) = sum_k K rho K^dagger."""
    m = as_density_matrix(rho, "input state")
    if m.shape[0] != q.input_dim:
        raise DimensionError(f"operation expects dim {q.input_dim}, got state of dim {m.shape[0]}")
    out = np.zeros((q.output_dim, q.output_dim), dtype=complex)
    for k in q.kraus:
        out = out + k @ m @ k.conj().T
    # Completeness is only checked to COMPLETENESS_TOL, so the raw trace can drift.
    return unit_trace(hermitian_part(out))


def output_states(e, q):
    return tuple(apply(q, s) for s in e.states)


def output_average(e, q):
    """rho'_S = sum_n p_n Q(rho^n)."""
    return _mix(e.probabilities, output_states(e, q))


def dephasing_operation(r):
    """Qubit dephasing Q_r: rho -> r rho + (1 - r) diag(rho)."""
    r = float(r)
    if not math.isfinite(r) or r < 0.0 or r > 1.0:
        raise ValidationError(f"dephasing strength r must lie in [0, 1], got {r}")
    k0 = math.sqrt((1.0 + r) / 2.0) * np.eye(2, dtype=complex)
    k1 = math.sqrt((1.0 - r) / 2.0) * np.diag([1.0, -1.0]).astype(complex)
    return QuantumOperation(kraus=(k0, k1), label=f"dephasing({r:.12g})")


def cnot_dephasing_parameter(alpha, beta):
    """r = alpha* beta + alpha beta* for a CNOT target alpha|0> + beta|1>."""
    alpha = complex(alpha)
    beta = complex(beta)
    return float((alpha.conjugate() * beta + alpha * beta.conjugate()).real)


def identity_operation(dim):
    return QuantumOperation(kraus=(np.eye(int(dim), dtype=complex),), label=f"identity({int(dim)})")


def reset_operation(dim, target=0):
    """Reset every input to the standard state |target><target|."""
    dim = int(dim)
    if not 0 <= int(target) < dim:
        raise ValidationError(f"reset target {target} out of range for dim {dim}")
    kraus = []
    for i in range(dim):
        k = np.zeros((dim, dim), dtype=complex)
        k[int(target), i] = 1.0
        kraus.append(k)
    return QuantumOperation(kraus=tuple(kraus), label=f"reset({dim}->{int(target)})")


def unitary_operation(u, label="unitary"):
    m = as_matrix(u, "unitary")
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"unitary must be square, got shape {m.shape}")
    err = unitarity_error(m)
    if err > UNITARY_TOL:
        raise ValidationError(f"matrix is not unitary (max |U^H U - I| = {err:.3e})")
    return QuantumOperation(kraus=(m,), label=label)


# =============================================================================
# Aligned coefficients
# =============================================================================

@dataclass(frozen=True)
class AlignedCoefficients:
    """Eigen-data of the average input/output and every signal in those bases.

    mu_in[n] = V^H rho^n V and mu_out[n] = W^H Q(rho^n) W, where the columns of
    V (basis_in) and W (basis_out) diagonalize rho_S and rho'_S with
    eigenvalues lambda_in / lambda_out in descending order.
    """
    lambda_in: np.ndarray
    lambda_out: np.ndarray
    basis_in: np.ndarray
    basis_out: np.ndarray
    mu_in: np.ndarray
    mu_out: np.ndarray
    probabilities: np.ndarray
    degeneracy_warning: bool = False
    labels: dict = field(default_factory=dict)

    @property
    def n_signals(self):
        return int(self.mu_in.shape[0])

    @property
    def dim_in(self):
        return int(self.lambda_in.shape[0])

    @property
    def dim_out(self):
        return int(self.lambda_out.shape[0])

    def average_input(self):
        v = self.basis_in
        return (v * self.lambda_in) @ v.conj().T

    def average_output(self):
        w = self.basis_out
        return (w * self.lambda_out) @ w.conj().T


def align_outputs(e, outputs, label=""):
    """Aligned coefficients for an ensemble and explicitly given output states."""
    outputs = tuple(as_density_matrix(o, name=f"output {n}") for n, o in enumerate(outputs))
    if len(outputs) != len(e):
        raise ValidationError(f"got {len(outputs)} outputs for {len(e)} signals")

    spec_in = eig_hermitian(average_state(e))
    spec_out = eig_hermitian(_mix(e.probabilities, outputs))
    v = spec_in.eigenvectors
    w = spec_out.eigenvectors
    mu_in = np.stack([v.conj().T @ s @ v for s in e.states])
    mu_out = np.stack([w.conj().T @ o @ w for o in outputs])

    degenerate = spec_in.degenerate or spec_out.degenerate
    if degenerate:
        warn("Ensemble", f"Degenerate spectrum{' for ' + label if label else ''}: "
                         "mu-coefficients depend on the chosen basis")

    return AlignedCoefficients(
        lambda_in=spec_in.eigenvalues,
        lambda_out=spec_out.eigenvalues,
        basis_in=v,
        basis_out=w,
        mu_in=mu_in,
        mu_out=mu_out,
        probabilities=e.probabilities.copy(),
        degeneracy_warning=degenerate,
        labels={"operation": label} if label else {},
    )


def align(e, q):
    """Express every signal and its image in the eigenbases of rho_S and rho'_S."""
    if e.dim != q.input_dim:
        raise DimensionError(f"operation expects dim {q.input_dim}, ensemble has dim {e.dim}")
    return align_outputs(e, output_states(e, q), label=q.label)


def alignment_residual(a):
    """Largest violation of the AlignedCoefficients invariants."""
    p = a.probabilities
    avg_in = np.einsum("n,nij->ij", p, a.mu_in)
    avg_out = np.einsum("n,nij->ij", p, a.mu_out)
    residuals = [
        np.max(np.abs(avg_in - np.diag(a.lambda_in))),
        np.max(np.abs(avg_out - np.diag(a.lambda_out))),
    ]
    for mu in list(a.mu_in) + list(a.mu_out):
        residuals.append(np.max(np.abs(mu - mu.conj().T)))
        residuals.append(abs(np.trace(mu) - 1.0))
    return float(max(residuals))
