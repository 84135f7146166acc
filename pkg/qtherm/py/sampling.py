"""
Random quantum objects for property sweeps and the verification suite.

Every sampler takes an explicit numpy Generator so runs are reproducible
from a seed.
"""
from __future__ import annotations

import numpy as np

from .ensemble import QuantumOperation, SignalEnsemble


def _ginibre(rng, rows, cols):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def random_unitary(rng, dim):
    """Haar-random unitary via QR with the R-diagonal phase correction."""
    q, r = np.linalg.qr(_ginibre(rng, dim, dim))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_isometry(rng, rows, cols):
    q, r = np.linalg.qr(_ginibre(rng, rows, cols))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_pure_state(rng, dim):
    v = _ginibre(rng, dim, 1).reshape(-1)
    return v / np.linalg.norm(v)


def random_density_matrix(rng, dim, rank=None):
    g = _ginibre(rng, dim, rank or dim)
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_probabilities(rng, n):
    return rng.dirichlet(np.ones(n))


def random_channel(rng, dim_in, dim_out=None, n_kraus=2):
    """Channel from a random Stinespring isometry."""
    dim_out = dim_out or dim_in
    v = random_isometry(rng, dim_out * n_kraus, dim_in)
    kraus = tuple(v[k * dim_out:(k + 1) * dim_out, :] for k in range(n_kraus))
    return QuantumOperation(kraus=kraus, label=f"random({dim_in}->{dim_out}, {n_kraus} Kraus)")


def measure_prepare_operation(rng, in_basis, dim_out=None):
    """Measure in the columns of `in_basis`, prepare random orthonormal outputs with random P(k|i)."""
    in_basis = np.asarray(in_basis, dtype=complex)
    dim_in = in_basis.shape[0]
    dim_out = dim_out or dim_in
    out_basis = random_unitary(rng, dim_out)
    table = rng.dirichlet(np.ones(dim_out), size=dim_in).T  # table[k, i] = P(k|i)
    kraus = tuple(
        np.sqrt(table[k, i]) * np.outer(out_basis[:, k], in_basis[:, i].conj())
        for i in range(dim_in)
        for k in range(dim_out)
    )
    return QuantumOperation(kraus=kraus, label=f"measure_prepare({dim_in}->{dim_out})")


def random_ensemble(rng, dim, n_signals, pure=False):
    states = []
    for _ in range(n_signals):
        if pure:
            v = random_pure_state(rng, dim)
            states.append(np.outer(v, v.conj()))
        else:
            states.append(random_density_matrix(rng, dim))
    return SignalEnsemble(random_probabilities(rng, n_signals), tuple(states))


def random_classical_ensemble(rng, dim, n_signals=None, basis=None):
    """Mutually orthogonal pure signals drawn from the columns of `basis` (random unitary by default)."""
    n_signals = n_signals or dim
    u = random_unitary(rng, dim) if basis is None else np.asarray(basis, dtype=complex)
    states = tuple(np.outer(u[:, n], u[:, n].conj()) for n in range(n_signals))
    return SignalEnsemble(random_probabilities(rng, n_signals), states)
