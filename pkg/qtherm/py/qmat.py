"""
Dense complex-matrix kernel.

Tensor products, partial traces, Hermitian eigendecomposition with
deterministic phases, entropies and the trace norm. Energies elsewhere in the
package are in units of kT; entropies here are in bits.

Matrices are plain numpy arrays. Functions that take a density matrix
validate it (Hermitian, unit trace, PSD within the tolerances below) and raise
ValidationError otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .settings import get_setting

# =============================================================================
# Tolerances
# =============================================================================

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_SLACK = -1e-10
RECONSTRUCTION_TOL = 1e-9
ORTHONORMAL_TOL = 1e-10
SUPPORT_CUTOFF = 1e-12
ENTROPY_CLAMP = 1e-14
DEGENERACY_GAP = 1e-9
# Eigenvalues closer than this share an eigenspace for basis canonicalization.
CLUSTER_GAP = 1e-10
_PHASE_TIE_TOL = 1e-12
_LEX_DECIMALS = 12


# =============================================================================
# Validation
# =============================================================================

def as_matrix(a, name="matrix"):
    """Return `a` as a finite complex 2-D array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"{name} must be a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has non-finite entries")
    return m


def as_square(a, name="matrix"):
    m = as_matrix(a, name)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def hermiticity_error(a):
    """Largest absolute entry of a - a^dagger."""
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)))


def hermitian_part(a):
    return 0.5 * (a + a.conj().T)


def as_density_matrix(rho, name="state"):
    """Validate a density matrix and return it as a complex array."""
    m = as_square(rho, name)
    if m.shape[0] == 0:
        raise DimensionError(f"{name} is empty")
    herm_err = hermiticity_error(m)
    if herm_err > HERMITIAN_TOL:
        raise ValidationError(f"{name} is not Hermitian (max |a - a^H| = {herm_err:.3e})")
    trace = float(np.trace(m).real)
    if abs(trace - 1.0) > TRACE_TOL:
        raise ValidationError(f"{name} must have unit trace, got {trace:.12g}")
    smallest = float(np.linalg.eigvalsh(hermitian_part(m))[0])
    if smallest < PSD_SLACK:
        raise ValidationError(f"{name} is not positive semidefinite (smallest eigenvalue {smallest:.3e})")
    return m


def is_density_matrix(rho):
    try:
        as_density_matrix(rho)
    except ValidationError:
        return False
    return True


def unitarity_error(u):
    """Largest absolute entry of U^dagger U - I."""
    m = as_square(u, "unitary")
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


# =============================================================================
# States
# =============================================================================

def ket_to_density(ket, name="ket"):
    """|v><v| for a normalized vector."""
    v = np.asarray(ket, dtype=complex).reshape(-1)
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise ValidationError(f"{name} must be a finite, non-empty vector")
    norm = float(np.vdot(v, v).real)
    if abs(norm - 1.0) > TRACE_TOL:
        raise ValidationError(f"{name} must be normalized, got squared norm {norm:.12g}")
    return np.outer(v, v.conj())


def bloch_ket(theta, phi):
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    return np.array([math.cos(theta / 2.0), np.exp(1j * phi) * math.sin(theta / 2.0)], dtype=complex)


def bloch_state(theta, phi):
    return ket_to_density(bloch_ket(theta, phi), name="bloch state")


# =============================================================================
# Tensor products and partial traces
# =============================================================================

def tensor(a, b):
    """Kronecker product a (x) b, subject to the configured dimension cap."""
    ma = as_matrix(a, "left factor")
    mb = as_matrix(b, "right factor")
    cap = get_setting("dimension_cap")
    rows = ma.shape[0] * mb.shape[0]
    cols = ma.shape[1] * mb.shape[1]
    if max(rows, cols) > cap:
        raise DimensionError(f"tensor product of shape ({rows}, {cols}) exceeds the dimension cap {cap}")
    return np.kron(ma, mb)


def tensor_all(*factors):
    result = as_matrix(factors[0], "factor 0")
    for factor in factors[1:]:
        result = tensor(result, factor)
    return result


def _check_dims(dims, total):
    dims = [int(d) for d in dims]
    if not dims or any(d <= 0 for d in dims):
        raise DimensionError(f"factor dimensions must be positive, got {dims}")
    if math.prod(dims) != total:
        raise DimensionError(f"factor dimensions {dims} do not multiply to {total}")
    return dims


def _partial_trace(m, dims, keep):
    n = len(dims)
    t = m.reshape(list(dims) * 2)
    remaining = n
    for axis in reversed(range(n)):
        if axis in keep:
            continue
        t = np.trace(t, axis1=axis, axis2=axis + remaining)
        remaining -= 1
    d_keep = math.prod(dims[k] for k in keep) if keep else 1
    return t.reshape(d_keep, d_keep)


def partial_trace(rho, dims, keep):
    """Trace out every factor not listed in `keep`; kept factors stay in order."""
    m = as_density_matrix(rho, "state")
    dims = _check_dims(dims, m.shape[0])
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {len(dims)} factors")
    return _partial_trace(m, dims, keep)


def embed_operator(op, dims, targets):
    """Lift an operator acting on factors `targets` to the full product space."""
    dims = [int(d) for d in dims]
    targets = [int(t) for t in targets]
    m = as_square(op, "operator")
    if m.shape[0] != math.prod(dims[t] for t in targets):
        raise DimensionError(f"operator of dim {m.shape[0]} does not match factors {targets} of {dims}")

    rest = [k for k in range(len(dims)) if k not in targets]
    order = targets + rest
    full = np.kron(m, np.eye(math.prod(dims[k] for k in rest) if rest else 1))
    shape = [dims[k] for k in order]
    n = len(dims)
    inverse = list(np.argsort(order))
    full = full.reshape(shape + shape).transpose(inverse + [n + i for i in inverse])
    total = math.prod(dims)
    return full.reshape(total, total)


# =============================================================================
# Eigendecomposition
# =============================================================================

@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (descending) and phase-fixed orthonormal eigenvector columns."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degenerate: bool = False

    @property
    def dim(self):
        return int(self.eigenvalues.shape[0])

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _fix_phase(v):
    """Make the first largest-magnitude entry real and positive."""
    mags = np.abs(v)
    top = mags.max()
    if top == 0.0:
        return v
    idx = int(np.flatnonzero(mags >= top - _PHASE_TIE_TOL)[0])
    fixed = v * (np.conj(v[idx]) / mags[idx])
    fixed[idx] = mags[idx]
    return fixed


def _lex_key(v):
    return tuple(
        x for entry in v for x in (round(float(entry.real), _LEX_DECIMALS), round(float(entry.imag), _LEX_DECIMALS))
    )


def _canonical_cluster_basis(block):
    """Orthonormal basis of span(block) built from the projected standard basis."""
    d, size = block.shape
    projector = block @ block.conj().T
    basis = []
    for m in range(d):
        candidate = projector[:, m].copy()
        for _ in range(2):
            for b in basis:
                candidate = candidate - b * np.vdot(b, candidate)
        norm = np.linalg.norm(candidate)
        if norm > 1e-6:
            basis.append(candidate / norm)
        if len(basis) == size:
            break
    fixed = [_fix_phase(b) for b in basis]
    fixed.sort(key=_lex_key, reverse=True)
    return np.column_stack(fixed)


def eig_hermitian(h):
    """Descending eigendecomposition with deterministic eigenvector phases.

    Eigenvectors inside a cluster of eigenvalues closer than CLUSTER_GAP are
    replaced by the standard basis projected onto the cluster, so degenerate
    inputs still get a reproducible basis. `degenerate` is set when any gap
    is below DEGENERACY_GAP.
    """
    m = as_square(h, "Hermitian matrix")
    herm_err = hermiticity_error(m)
    if herm_err > HERMITIAN_TOL:
        raise ValidationError(f"matrix is not Hermitian (max |a - a^H| = {herm_err:.3e})")

    vals, vecs = np.linalg.eigh(hermitian_part(m))
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    d = vals.shape[0]

    start = 0
    while start < d:
        end = start + 1
        while end < d and vals[end - 1] - vals[end] <= CLUSTER_GAP:
            end += 1
        if end - start > 1:
            vecs[:, start:end] = _canonical_cluster_basis(vecs[:, start:end])
        else:
            vecs[:, start] = _fix_phase(vecs[:, start])
        start = end

    degenerate = bool(d > 1 and np.any(vals[:-1] - vals[1:] < DEGENERACY_GAP))
    return Spectrum(eigenvalues=vals, eigenvectors=vecs, degenerate=degenerate)


# =============================================================================
# Entropies and norms
# =============================================================================

def shannon_entropy(probs):
    """Shannon entropy in bits; values below ENTROPY_CLAMP count as zero."""
    p = np.asarray(probs, dtype=float).reshape(-1)
    p = np.where(p < ENTROPY_CLAMP, 0.0, p)
    terms = np.where(p > 0.0, -p * np.log2(np.where(p > 0.0, p, 1.0)), 0.0)
    s = float(np.sum(terms))
    return s if s > 0.0 else 0.0


def entropy(rho):
    """von Neumann entropy in bits."""
    m = as_density_matrix(rho, "state")
    return shannon_entropy(np.linalg.eigvalsh(hermitian_part(m)))


def relative_entropy(rho, sigma):
    """S(rho || sigma) in bits; math.inf when supp(rho) is not inside supp(sigma)."""
    r = as_density_matrix(rho, "rho")
    s = as_density_matrix(sigma, "sigma")
    if r.shape != s.shape:
        raise DimensionError(f"relative entropy needs equal dims, got {r.shape[0]} and {s.shape[0]}")

    p = np.clip(np.linalg.eigvalsh(hermitian_part(r)), 0.0, None)
    q, b = np.linalg.eigh(hermitian_part(s))
    q = np.clip(q, 0.0, None)
    # weight_j = <b_j| rho |b_j>
    weight = np.real(np.einsum("ij,ik,kj->j", b.conj(), r, b))

    null = q <= SUPPORT_CUTOFF
    if np.any(weight[null] > SUPPORT_CUTOFF):
        return math.inf

    p_pos = p > ENTROPY_CLAMP
    rho_log_rho = float(np.sum(p[p_pos] * np.log2(p[p_pos])))
    rho_log_sigma = float(np.sum(weight[~null] * np.log2(q[~null])))
    return rho_log_rho - rho_log_sigma


def trace_norm(a):
    """Schatten-1 norm: the sum of singular values."""
    m = as_square(a, "matrix")
    if m.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))
