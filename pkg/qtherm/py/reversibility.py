"""
Reversibility test on aligned coefficients.

An operation is reversible on an ensemble when the outputs share one diagonal
basis and a left-stochastic map P(k|i) carries every input diagonal onto the
matching output diagonal:

    mu'^n_kl = delta_kl * sum_i P(k|i) mu^n_ii      for every signal n.

The map is found with the phase-I simplex in simplex.py. When no map exists
the verdict says which half of the condition failed, unless every quadruple
that could force a non-zero bound is an eigenvalue-ratio symmetry, in which
case the result is inconclusive.
Used by: bounds.analyze, protocols.special_case_protocol_ledger, commands
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .console import warn
from .simplex import phase_one

CODIAGONAL_TOL = 1e-9
SYMMETRY_TOL = 1e-9
MAP_TOL = 1e-8
# Off-diagonal candidate search
OUTPUT_COHERENCE_TOL = 1e-9
INPUT_COEFFICIENT_TOL = 1e-12
DIVISOR_TOL = 1e-12


@dataclass(frozen=True)
class StochasticMap:
    """p[k, i] = P(k|i); columns sum to one."""
    p: np.ndarray
    residual: float = 0.0
    conditioning_warning: bool = False

    @property
    def shape(self):
        return self.p.shape

    def to_list(self):
        return [[float(x) for x in row] for row in self.p]


@dataclass(frozen=True)
class SymmetryQuadruple:
    i: int
    j: int
    k: int
    l: int
    ratio: float

    def to_dict(self):
        ratio = self.ratio if np.isfinite(self.ratio) else None
        return {"i": self.i, "j": self.j, "k": self.k, "l": self.l, "ratio": ratio}


class VerdictKind(str, Enum):
    REVERSIBLE = "reversible"
    IRREVERSIBLE_DIAGONAL = "irreversible_diagonal"
    IRREVERSIBLE_OFFDIAGONAL = "irreversible_offdiagonal"
    SYMMETRIC_INCONCLUSIVE = "symmetric_inconclusive"


@dataclass(frozen=True)
class ReversibilityVerdict:
    kind: VerdictKind
    stochastic_map: StochasticMap | None = None
    symmetries: tuple = ()
    details: str = ""

    @property
    def is_reversible(self):
        return self.kind is VerdictKind.REVERSIBLE


@dataclass(frozen=True)
class OffDiagonalCandidate:
    """One (n, k, l) term of the analytic off-diagonal bound.

    `value` is the trace-norm lower bound this term certifies. A candidate is
    blocked (value 0) when a symmetric divisor meets a non-zero input
    coefficient; `blocked_by` lists those (i, j) pairs.
    """
    n: int
    k: int
    l: int
    value: float
    blocked_by: tuple = ()

    @property
    def blocked(self):
        return bool(self.blocked_by)


# =============================================================================
# Predicates
# =============================================================================

def max_output_coherence(a):
    """Largest |mu'^n_kl| with k != l."""
    d = a.dim_out
    if d < 2:
        return 0.0
    off = ~np.eye(d, dtype=bool)
    return float(np.max(np.abs(a.mu_out[:, off])))


def outputs_codiagonal(a):
    return max_output_coherence(a) <= CODIAGONAL_TOL


def is_symmetric(lambda_in, lambda_out, i, j, k, l):
    """lambda_i lambda'_l == lambda_j lambda'_k within the relative tolerance."""
    lhs = lambda_in[i] * lambda_out[l]
    rhs = lambda_in[j] * lambda_out[k]
    return abs(lhs - rhs) <= SYMMETRY_TOL * max(1.0, abs(rhs))


def _ratio(lambda_in, lambda_out, i, j, k, l):
    if lambda_in[j] > 0.0:
        return float(lambda_in[i] / lambda_in[j])
    if lambda_out[l] > 0.0:
        return float(lambda_out[k] / lambda_out[l])
    return float("nan")


def detect_symmetries(lambda_in, lambda_out):
    """Every (i, j, k, l) with i != j or k != l where lambda_i/lambda_j = lambda'_k/lambda'_l."""
    lam = np.asarray(lambda_in, dtype=float)
    lam_out = np.asarray(lambda_out, dtype=float)
    found = []
    for i in range(lam.size):
        for j in range(lam.size):
            for k in range(lam_out.size):
                for l in range(lam_out.size):
                    if i == j and k == l:
                        continue
                    if is_symmetric(lam, lam_out, i, j, k, l):
                        found.append(SymmetryQuadruple(i, j, k, l, _ratio(lam, lam_out, i, j, k, l)))
    return found


# =============================================================================
# Stochastic map
# =============================================================================

def _diagonal_constraints(a):
    """Equality system over P flattened as index k * d_in + i."""
    d_in, d_out = a.dim_in, a.dim_out
    diag_in = np.real(np.diagonal(a.mu_in, axis1=1, axis2=2))
    diag_out = np.real(np.diagonal(a.mu_out, axis1=1, axis2=2))

    rows, rhs = [], []
    for i in range(d_in):
        row = np.zeros(d_out * d_in)
        row[i::d_in] = 1.0
        rows.append(row)
        rhs.append(1.0)
    for n in range(a.n_signals):
        for k in range(d_out):
            row = np.zeros(d_out * d_in)
            row[k * d_in:(k + 1) * d_in] = diag_in[n]
            rows.append(row)
            rhs.append(diag_out[n, k])
    return np.array(rows), np.array(rhs)


def map_residual(a, p):
    """Worst violation of the reversibility equations and column sums by P."""
    p = np.asarray(p, dtype=float)
    diag_in = np.real(np.diagonal(a.mu_in, axis1=1, axis2=2))
    predicted = np.einsum("ki,ni->nk", p, diag_in)
    expected = np.zeros_like(a.mu_out)
    idx = np.arange(a.dim_out)
    expected[:, idx, idx] = predicted
    residuals = [
        float(np.max(np.abs(a.mu_out - expected))),
        float(np.max(np.abs(p.sum(axis=0) - 1.0))),
    ]
    return max(residuals)


def find_stochastic_map(a):
    """A left-stochastic P satisfying the reversibility equations, or None."""
    if not outputs_codiagonal(a):
        return None

    A, b = _diagonal_constraints(a)
    result = phase_one(A, b)
    if not result.feasible:
        return None

    p = result.x.reshape(a.dim_out, a.dim_in)
    p = np.where(p < 0.0, 0.0, p)
    p = p / p.sum(axis=0, keepdims=True)
    residual = map_residual(a, p)
    if residual > MAP_TOL:
        warn("Reversibility", f"LP vertex misses the output diagonals by {residual:.3e}; treating as infeasible")
        return None
    if result.ill_conditioned:
        warn("Reversibility", "Stochastic-map LP used a pivot below 1e-10; result may be ill-conditioned")
    return StochasticMap(p=p, residual=residual, conditioning_warning=result.ill_conditioned)


# =============================================================================
# Off-diagonal candidates (shared with bounds.offdiag_bound)
# =============================================================================

def offdiag_candidates(a):
    """All (n, k != l) output coherences with the trace-norm bound each one implies."""
    lam, lam_out = a.lambda_in, a.lambda_out
    d_in, d_out = a.dim_in, a.dim_out
    candidates = []
    for n in range(a.n_signals):
        mu = a.mu_in[n]
        for k in range(d_out):
            for l in range(d_out):
                if k == l:
                    continue
                coherence = abs(a.mu_out[n, k, l])
                if coherence <= OUTPUT_COHERENCE_TOL:
                    continue
                total = 0.0
                blocked = []
                for i in range(d_in):
                    for j in range(d_in):
                        weight = abs(mu[i, j])
                        if weight <= INPUT_COEFFICIENT_TOL:
                            continue
                        divisor = abs(lam[j] * lam_out[k] - lam[i] * lam_out[l])
                        if divisor <= DIVISOR_TOL:
                            blocked.append((i, j))
                            continue
                        total += weight / divisor
                if blocked or total == 0.0:
                    value = 0.0
                else:
                    value = (coherence / (lam_out[k] + lam_out[l])) / total
                candidates.append(OffDiagonalCandidate(n, k, l, float(value), tuple(blocked)))
    return candidates


def _diagonal_blocked(a):
    """True when every (i != j, k, k) quadruple is an eigenvalue-ratio symmetry."""
    lam, lam_out = a.lambda_in, a.lambda_out
    return all(
        is_symmetric(lam, lam_out, i, j, k, k)
        for i in range(a.dim_in)
        for j in range(a.dim_in)
        if i != j
        for k in range(a.dim_out)
    )


def classify(a):
    symmetries = tuple(detect_symmetries(a.lambda_in, a.lambda_out))

    if outputs_codiagonal(a):
        stochastic_map = find_stochastic_map(a)
        if stochastic_map is not None:
            return ReversibilityVerdict(
                kind=VerdictKind.REVERSIBLE,
                stochastic_map=stochastic_map,
                symmetries=symmetries,
                details=f"stochastic map found (residual {stochastic_map.residual:.2e})",
            )
        if _diagonal_blocked(a):
            return ReversibilityVerdict(
                kind=VerdictKind.SYMMETRIC_INCONCLUSIVE,
                symmetries=symmetries,
                details="outputs co-diagonal, no stochastic map, every diagonal quadruple is symmetric",
            )
        return ReversibilityVerdict(
            kind=VerdictKind.IRREVERSIBLE_DIAGONAL,
            symmetries=symmetries,
            details="outputs co-diagonal but no stochastic map reproduces the output diagonals",
        )

    candidates = offdiag_candidates(a)
    if all(c.blocked for c in candidates):
        return ReversibilityVerdict(
            kind=VerdictKind.SYMMETRIC_INCONCLUSIVE,
            symmetries=symmetries,
            details="every output coherence meets an eigenvalue-ratio symmetry",
        )
    return ReversibilityVerdict(
        kind=VerdictKind.IRREVERSIBLE_OFFDIAGONAL,
        symmetries=symmetries,
        details=f"outputs not co-diagonal (max coherence {max_output_coherence(a):.3e})",
    )
