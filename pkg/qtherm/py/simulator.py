"""
Explicit implementations of quantum operations and numeric checks of the cost identities.

An Implementation is a unitary on system (x) auxiliary (x) bath together with
the auxiliary's standard state and a canonical heat bath. From it we get the
joint output, the bath energy change, the q(kl|ij) coefficients of the
operation in the aligned bases, and the operator blocks used by the trace-norm
inequalities.

Energies are in kT (beta = 1); entropies in bits.
Used by: verification, commands.verify
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .console import log
from .ensemble import QuantumOperation, average_state, cnot_dephasing_parameter
from .errors import ContractError, DimensionError, ExtractionError, ValidationError
from .qmat import (
    as_density_matrix,
    as_square,
    embed_operator,
    entropy,
    hermiticity_error,
    hermitian_part,
    partial_trace,
    relative_entropy,
    tensor,
    tensor_all,
    trace_norm,
    unitarity_error,
)
from .sampling import random_probabilities, random_unitary
from .settings import get_setting

LN2 = math.log(2.0)
UNITARY_TOL = 1e-9
NORMALIZATION_TOL = 1e-10
RESET_PRECONDITION = 1e-6
EXTRACTION_TOL = 1e-8
KRAUS_WEIGHT_CUTOFF = 1e-15


# =============================================================================
# Heat bath
# =============================================================================

@dataclass(frozen=True)
class HeatBath:
    """Canonical bath at beta = 1 with a diagonal Hamiltonian."""
    energies: np.ndarray

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float).reshape(-1)
        if energies.size == 0 or not np.all(np.isfinite(energies)):
            raise ValidationError("bath energies must be a finite, non-empty list")
        object.__setattr__(self, "energies", energies)

    @classmethod
    def equally_spaced(cls, dim=None, spacing=None):
        dim = int(dim if dim is not None else get_setting("bath_dim"))
        spacing = float(spacing if spacing is not None else get_setting("bath_spacing"))
        if dim <= 0:
            raise ValidationError(f"bath dimension must be positive, got {dim}")
        return cls(energies=spacing * np.arange(dim))

    @property
    def dim(self):
        return int(self.energies.size)

    @property
    def hamiltonian(self):
        return np.diag(self.energies).astype(complex)

    @property
    def populations(self):
        # Shift by the ground energy before exponentiating.
        boltzmann = np.exp(-(self.energies - self.energies.min()))
        return boltzmann / boltzmann.sum()

    @property
    def state(self):
        return np.diag(self.populations).astype(complex)

    def mean_energy(self, rho):
        return float(np.real(np.trace(self.hamiltonian @ rho)))


# =============================================================================
# Implementations
# =============================================================================

@dataclass(frozen=True)
class Implementation:
    unitary: np.ndarray
    aux_state: np.ndarray
    bath: HeatBath
    dims: tuple
    label: str = ""

    def __post_init__(self):
        u = as_square(self.unitary, "implementation unitary")
        dims = tuple(int(x) for x in self.dims)
        if len(dims) != 3 or any(x <= 0 for x in dims):
            raise DimensionError(f"implementation dims must be three positive counts, got {self.dims}")
        if math.prod(dims) != u.shape[0]:
            raise DimensionError(f"unitary of dim {u.shape[0]} does not match dims {dims}")
        if dims[2] != self.bath.dim:
            raise DimensionError(f"bath has dim {self.bath.dim}, dims declare {dims[2]}")
        aux = as_density_matrix(self.aux_state, "auxiliary state")
        if aux.shape[0] != dims[1]:
            raise DimensionError(f"auxiliary state has dim {aux.shape[0]}, dims declare {dims[1]}")
        err = unitarity_error(u)
        if err > UNITARY_TOL:
            raise ValidationError(f"implementation matrix is not unitary (max |U^H U - I| = {err:.3e})")
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "aux_state", aux)
        object.__setattr__(self, "dims", dims)

    @property
    def system_dim(self):
        return self.dims[0]

    @property
    def environment_dim(self):
        return self.dims[1] * self.dims[2]

    def environment_state(self):
        """rho_A (x) rho_B."""
        return tensor(self.aux_state, self.bath.state)

    def evolve(self, rho):
        """U (rho (x) rho_A (x) rho_B) U^dagger."""
        joint = tensor(rho, self.environment_state())
        return hermitian_part(self.unitary @ joint @ self.unitary.conj().T)

    def blocks(self, basis_out, basis_in):
        """A[k, i] = <phi'_k| U |phi_i>, an operator on auxiliary (x) bath."""
        d, m = self.system_dim, self.environment_dim
        u4 = self.unitary.reshape(d, m, d, m)
        return np.einsum("sk,sxty,ti->kixy", basis_out.conj(), u4, basis_in)

    def channel(self):
        """The system operation this implementation performs, in Kraus form."""
        d, m = self.system_dim, self.environment_dim
        weights, vectors = np.linalg.eigh(hermitian_part(self.environment_state()))
        u4 = self.unitary.reshape(d, m, d, m)
        kraus = []
        for a in range(m):
            if weights[a] <= KRAUS_WEIGHT_CUTOFF:
                continue
            for b in range(m):
                kraus.append(math.sqrt(weights[a]) * (u4[:, b, :, :] @ vectors[:, a]))
        return QuantumOperation(kraus=tuple(kraus), label=self.label or "implementation")

    def corrupted(self, angle):
        """Same implementation followed by a rotation of the auxiliary.

        The rotation mixes |0> and |d_A - 1> with an imaginary generator, so it
        breaks the reset whenever rho_A has a real coherence between them (the
        CNOT auxiliary with r != 0 does).
        """
        d_a = self.dims[1]
        if d_a < 2:
            raise ValidationError("cannot rotate a one-dimensional auxiliary")
        generator = np.zeros((d_a, d_a), dtype=complex)
        generator[0, -1] = -1j
        generator[-1, 0] = 1j
        rotation = _expm_hermitian(generator, angle)
        lifted = embed_operator(rotation, self.dims, [1])
        return Implementation(
            unitary=lifted @ self.unitary,
            aux_state=self.aux_state,
            bath=self.bath,
            dims=self.dims,
            label=f"{self.label} + aux rotation({angle:g})",
        )


def _expm_hermitian(h, angle):
    """exp(-i angle h) for Hermitian h."""
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(-1j * angle * vals)) @ vecs.conj().T


def _shift(dim):
    x = np.zeros((dim, dim), dtype=complex)
    for a in range(dim):
        x[(a + 1) % dim, a] = 1.0
    return x


def _fourier_basis(dim):
    omega = np.exp(2j * np.pi / dim)
    idx = np.arange(dim)
    return omega ** np.outer(idx, idx) / math.sqrt(dim)


def _controlled_shift(dim):
    """|s>|a> -> |s>|a + s mod d>."""
    x = _shift(dim)
    u = np.zeros((dim * dim, dim * dim), dtype=complex)
    power = np.eye(dim, dtype=complex)
    for s in range(dim):
        u[s * dim:(s + 1) * dim, s * dim:(s + 1) * dim] = power
        power = x @ power
    return u


def controlled_shift_impl(aux_weights, bath=None, label=""):
    """Controlled shift from the system onto a shift-invariant auxiliary.

    The auxiliary is diagonal in the Fourier basis with the given weights, so
    it commutes with the shift and returns to itself for every input signal.
    """
    weights = np.asarray(aux_weights, dtype=float).reshape(-1)
    if weights.size < 1 or np.any(weights < 0.0) or abs(weights.sum() - 1.0) > NORMALIZATION_TOL:
        raise ValidationError("auxiliary weights must be non-negative and sum to 1")
    d = int(weights.size)
    bath = bath or HeatBath.equally_spaced()
    f = _fourier_basis(d)
    aux = hermitian_part((f * weights) @ f.conj().T)
    c_sa = _controlled_shift(d)
    u = np.kron(c_sa, np.eye(bath.dim, dtype=complex))
    return Implementation(unitary=u, aux_state=aux, bath=bath, dims=(d, d, bath.dim),
                          label=label or f"controlled_shift({d})")


def cnot_dephasing_impl(alpha, beta, bath_dim=None):
    """CNOT onto an auxiliary with <X> = alpha* beta + alpha beta*, realizing dephasing Q_r.

    The auxiliary is the target state dephased in the X basis, (I + r X) / 2,
    which gives the same channel as the pure target and resets exactly.
    """
    alpha = complex(alpha)
    beta = complex(beta)
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > NORMALIZATION_TOL:
        raise ValidationError(f"CNOT target must be normalized, got |alpha|^2 + |beta|^2 = {norm:.12g}")
    r = cnot_dephasing_parameter(alpha, beta)
    r = min(1.0, max(-1.0, r))
    bath = HeatBath.equally_spaced(bath_dim)
    return controlled_shift_impl([(1.0 + r) / 2.0, (1.0 - r) / 2.0], bath=bath, label=f"cnot_dephasing({r:.12g})")


def random_reset_impl(rng, system_dim=2, bath_dim=None):
    """W_SB (C_SA (x) I_B) with a Haar W_SB: resets the auxiliary and moves bath energy."""
    d = int(system_dim)
    bath = HeatBath.equally_spaced(bath_dim)
    weights = random_probabilities(rng, d)
    base = controlled_shift_impl(weights, bath=bath)
    w_sb = embed_operator(random_unitary(rng, d * bath.dim), base.dims, [0, 2])
    return Implementation(unitary=w_sb @ base.unitary, aux_state=base.aux_state, bath=bath,
                          dims=base.dims, label=f"random_reset({d}, bath {bath.dim})")


def identity_impl(system_dim, bath_dim=None):
    bath = HeatBath.equally_spaced(bath_dim)
    d = int(system_dim)
    return Implementation(unitary=np.eye(d * bath.dim, dtype=complex), aux_state=np.ones((1, 1), dtype=complex),
                          bath=bath, dims=(d, 1, bath.dim), label=f"identity({d})")


# =============================================================================
# Running an implementation
# =============================================================================

@dataclass(frozen=True)
class RunResult:
    rho_prime: np.ndarray
    delta_E_kT: float
    reset_residual: float


def _check_ensemble(impl, e):
    if e.dim != impl.system_dim:
        raise DimensionError(f"implementation acts on dim {impl.system_dim}, ensemble has dim {e.dim}")


def run(impl, e):
    """Joint output for the average input, bath energy change, and average reset residual."""
    _check_ensemble(impl, e)
    rho_prime = impl.evolve(average_state(e))
    bath_after = partial_trace(rho_prime, impl.dims, [2])
    delta_e = impl.bath.mean_energy(bath_after) - impl.bath.mean_energy(impl.bath.state)
    aux_after = partial_trace(rho_prime, impl.dims, [1])
    return RunResult(rho_prime=rho_prime, delta_E_kT=float(delta_e),
                     reset_residual=trace_norm(aux_after - impl.aux_state))


def signal_reset_residuals(impl, e):
    """Per-signal ||Tr_SB[rho'^n] - rho_A||_1; the stricter reset mode."""
    _check_ensemble(impl, e)
    return [trace_norm(partial_trace(impl.evolve(s), impl.dims, [1]) - impl.aux_state) for s in e.states]


def reference_state(impl, rho_prime):
    """rho_star = Tr_AB[rho'] (x) rho_A (x) rho_B."""
    return tensor_all(partial_trace(rho_prime, impl.dims, [0]), impl.aux_state, impl.bath.state)


def _require_reset(result):
    if result.reset_residual > RESET_PRECONDITION:
        raise ContractError(f"auxiliary does not reset (residual {result.reset_residual:.3e} > {RESET_PRECONDITION})")


def verify_lemma1(impl, e):
    """|dE / ln2 - [S(rho_S) - S(rho'_S)] - S(rho' || rho_star)|."""
    result = run(impl, e)
    _require_reset(result)
    rho_s = average_state(e)
    rho_s_out = partial_trace(result.rho_prime, impl.dims, [0])
    rel = relative_entropy(result.rho_prime, reference_state(impl, result.rho_prime))
    if math.isinf(rel):
        return math.inf
    return abs(result.delta_E_kT / LN2 - (entropy(rho_s) - entropy(rho_s_out)) - rel)


def verify_excess_bound(impl, e):
    """(dE - Landauer) - 1/2 ||rho' - rho_star||_1^2; non-negative when the reset holds."""
    result = run(impl, e)
    _require_reset(result)
    rho_s_out = partial_trace(result.rho_prime, impl.dims, [0])
    landauer = LN2 * (entropy(average_state(e)) - entropy(rho_s_out))
    distance = trace_norm(result.rho_prime - reference_state(impl, result.rho_prime))
    return (result.delta_E_kT - landauer) - 0.5 * distance ** 2


# =============================================================================
# q-coefficients and proof operators
# =============================================================================

@dataclass(frozen=True)
class ImplementationCoefficients:
    """q[k, l, i, j] = Tr[A_ki rho_AB A_lj^dagger]."""
    q: np.ndarray
    worst_residual: float = 0.0

    def value(self, k, l, i, j):
        return complex(self.q[k, l, i, j])


def _check_alignment(impl, a):
    if a.dim_in != impl.system_dim or a.dim_out != impl.system_dim:
        raise DimensionError(f"alignment dims {a.dim_in} -> {a.dim_out} do not match system dim {impl.system_dim}")


def extract_q(impl, a):
    _check_alignment(impl, a)
    blocks = impl.blocks(a.basis_out, a.basis_in)
    env = impl.environment_state()
    q = np.einsum("kixy,yz,ljxz->klij", blocks, env, blocks.conj())

    d = impl.system_dim
    idx = np.arange(d)
    populations = q[idx, idx][:, idx, idx]  # q(kk|ii)
    residuals = {
        "imaginary q(kk|ii)": float(np.max(np.abs(np.imag(populations)))),
        "negative q(kk|ii)": float(max(0.0, -np.min(np.real(populations)))),
        "sum_k q(kk|ij) - delta_ij": float(np.max(np.abs(q[idx, idx].sum(axis=0) - np.eye(d)))),
        "coefficient map": float(np.max(np.abs(np.einsum("klij,nij->nkl", q, a.mu_in) - a.mu_out))),
    }
    name, worst = max(residuals.items(), key=lambda item: item[1])
    if worst > EXTRACTION_TOL:
        raise ExtractionError(f"q-coefficients violate '{name}'", worst)
    return ImplementationCoefficients(q=q, worst_residual=worst)


@dataclass(frozen=True)
class ProofOperatorSet:
    """A-blocks of the implementation and blocks of rho' - rho_star, both in the aligned frame.

    g_left, g_right and h_operator assemble the operators used in the
    trace-norm bounds as full matrices on system (x) environment, with the
    system factor written in the output eigenbasis.
    """
    A: np.ndarray
    Delta: np.ndarray
    env: np.ndarray
    lambda_in: np.ndarray
    lambda_out: np.ndarray
    distance: float = 0.0

    @property
    def dim(self):
        return int(self.A.shape[0])

    @property
    def difference(self):
        """rho' - rho_star assembled from Delta, in the aligned frame."""
        d, m = self.dim, self.A.shape[2]
        return self.Delta.transpose(0, 2, 1, 3).reshape(d * m, d * m)

    def _unit(self, k, l):
        e = np.zeros((self.dim, self.dim), dtype=complex)
        e[k, l] = 1.0
        return e

    def f_operator(self, i, j, k, l, m):
        return np.kron(self._unit(l, m), self.A[k, i] @ self.A[m, j].conj().T)

    def g_left(self, i, j, k, l):
        return sum(self.f_operator(i, j, k, l, m) for m in range(self.dim))

    def g_right(self, i, j, k, l):
        return sum(self.f_operator(j, i, l, k, m).conj().T for m in range(self.dim))

    def h_operator(self, i, j, k, m):
        return (np.kron(self._unit(m, k), self.A[m, i] @ self.A[k, j].conj().T)
                - np.kron(self._unit(k, m), self.A[k, i] @ self.A[m, j].conj().T))

    def q(self):
        return np.einsum("kixy,yz,ljxz->klij", self.A, self.env, self.A.conj())

    def unitarity_residual(self):
        """Both block-unitarity sums against delta_ij * I."""
        d, m = self.dim, self.A.shape[2]
        target = np.einsum("ij,xz->ijxz", np.eye(d), np.eye(m))
        rows = np.einsum("ikxy,jkzy->ijxz", self.A, self.A.conj())
        cols = np.einsum("kiyx,kjyz->ijxz", self.A.conj(), self.A)
        return float(max(np.max(np.abs(rows - target)), np.max(np.abs(cols - target))))

    def identity_residual(self):
        """Worst mismatch of the two trace identities that drive the bounds."""
        lam, lam_out = self.lambda_in, self.lambda_out
        diff = self.difference
        q = self.q()
        d = self.dim
        worst = 0.0
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    for l in range(d):
                        lhs = (lam[j] * lam_out[k] - lam[i] * lam_out[l]) * q[k, l, i, j]
                        rhs = (lam_out[k] * np.trace(self.g_left(i, j, k, l) @ diff)
                               - lam_out[l] * np.trace(self.g_right(i, j, k, l) @ diff))
                        worst = max(worst, abs(lhs - rhs))
                    lhs = (lam[i] - lam[j]) * q[k, k, i, j]
                    rhs = sum(np.trace(self.h_operator(i, j, k, m) @ diff) for m in range(d) if m != k)
                    worst = max(worst, abs(lhs - rhs))
        return float(worst)


def _joint_output(impl, a):
    rho_s = a.average_input()
    rho_prime = impl.evolve(rho_s)
    return rho_prime, rho_prime - reference_state(impl, rho_prime)


def proof_operators(impl, a):
    _check_alignment(impl, a)
    d, m = impl.system_dim, impl.environment_dim
    _, difference = _joint_output(impl, a)
    w = a.basis_out
    d4 = difference.reshape(d, m, d, m)
    delta = np.einsum("sa,sxty,tb->abxy", w.conj(), d4, w)
    return ProofOperatorSet(
        A=impl.blocks(a.basis_out, a.basis_in),
        Delta=delta,
        env=impl.environment_state(),
        lambda_in=a.lambda_in,
        lambda_out=a.lambda_out,
        distance=trace_norm(difference),
    )


def verify_lemma3(impl, a):
    """Smallest ||rho' - rho_star||_1 - |lam_j lam'_k - lam_i lam'_l| / (lam'_k + lam'_l) * |q(kl|ij)|."""
    coeffs = extract_q(impl, a)
    _, difference = _joint_output(impl, a)
    distance = trace_norm(difference)
    lam, lam_out = a.lambda_in, a.lambda_out
    d = impl.system_dim
    worst = math.inf
    for i in range(d):
        for j in range(d):
            for k in range(d):
                for l in range(d):
                    denom = lam_out[k] + lam_out[l]
                    if denom <= 0.0:
                        continue
                    bound = abs(lam[j] * lam_out[k] - lam[i] * lam_out[l]) / denom * abs(coeffs.q[k, l, i, j])
                    worst = min(worst, distance - bound)
    return distance if math.isinf(worst) else float(worst)


def verify_lemma2(impl, a):
    """Qubit variant: ||rho' - rho_star||_1 - |lam_i - lam_j| |q(kk|ij)|, minimized."""
    if impl.system_dim != 2:
        raise ContractError(f"the qubit trace-norm bound needs system dim 2, got {impl.system_dim}")
    coeffs = extract_q(impl, a)
    _, difference = _joint_output(impl, a)
    distance = trace_norm(difference)
    lam = a.lambda_in
    worst = math.inf
    for i in range(2):
        for j in range(2):
            for k in range(2):
                worst = min(worst, distance - abs(lam[i] - lam[j]) * abs(coeffs.q[k, k, i, j]))
    return float(worst)


# =============================================================================
# N-copy bath
# =============================================================================

def ncopy_demo(bath, delta, n_copies):
    """Energy and scaled relative entropy when a perturbation is spread over n bath copies.

    Each copy moves by delta / n, so the total energy change stays Tr[H delta]
    while n * S(rho_B + delta / n || rho_B) falls off like 1 / n.
    """
    n = int(n_copies)
    if n <= 0:
        raise ValidationError(f"n_copies must be positive, got {n_copies}")
    d = as_square(delta, "bath perturbation")
    if d.shape[0] != bath.dim:
        raise DimensionError(f"perturbation has dim {d.shape[0]}, bath has dim {bath.dim}")
    if hermiticity_error(d) > 1e-10 or abs(np.trace(d)) > 1e-10:
        raise ValidationError("bath perturbation must be Hermitian and traceless")

    eps = 1.0 / n
    perturbed = bath.state + eps * d
    try:
        as_density_matrix(perturbed, "perturbed bath state")
    except ValidationError as exc:
        raise ValidationError(f"perturbation too large for {n} copies: {exc}") from exc

    delta_e = n * eps * float(np.real(np.trace(bath.hamiltonian @ d)))
    rel = n * relative_entropy(perturbed, bath.state)
    log("Simulator", f"n={n}: dE={delta_e:.6g} kT, n*S={rel:.6g} bits")
    return delta_e, rel
