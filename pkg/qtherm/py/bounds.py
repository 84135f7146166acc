"""
Landauer term and lower bounds on the excess cost.

All energies are in units of kT. The excess cost lower bound comes from one
of two places:

  - outputs that are not co-diagonal: the analytic off-diagonal bound, built
    from the candidate terms in reversibility.offdiag_candidates;
  - qubit operations with co-diagonal outputs and no stochastic map: the
    smallest |w| for which the two-signal coefficient system still has
    q11, q12 in [0, 1], found on a polar grid and refined by bisection.

analyze() picks the right route from the reversibility verdict and packs
everything into a ThermoReport.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .console import log, warn
from .ensemble import align, average_state, output_average
from .errors import ContractError, DegenerateDiagonalsError, ScanExhaustedError, ValidationError
from .qmat import entropy
from .reversibility import (
    VerdictKind,
    classify,
    offdiag_candidates,
    outputs_codiagonal,
)

LN2 = math.log(2.0)
Q_RANGE_TOL = 1e-9
SINGULAR_DIAGONAL_TOL = 1e-9
CONSISTENCY_TOL = 1e-9
_FLAT_SLOPE = 1e-15
_GRID_SLACK = 1e-9

NEGATIVE_TOTAL_WARNING = "negative total: the operation may still be used to extract energy from the heat bath"


# =============================================================================
# Configuration and results
# =============================================================================

@dataclass(frozen=True)
class ScanConfig:
    radius_step: float = 1e-4
    phase_steps: int = 720
    radius_cap: float = 1.0
    refine_tol: float = 1e-6

    def __post_init__(self):
        for name in ("radius_step", "radius_cap", "refine_tol"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value) or value <= 0:
                raise ValidationError(f"scan {name} must be a positive number, got {value!r}")
        if not isinstance(self.phase_steps, int) or isinstance(self.phase_steps, bool) or self.phase_steps <= 0:
            raise ValidationError(f"scan phase_steps must be a positive integer, got {self.phase_steps!r}")
        if self.refine_tol >= self.radius_step:
            raise ValidationError("scan refine_tol must be smaller than radius_step")

    def to_dict(self):
        return {
            "radius_step": self.radius_step,
            "phase_steps": self.phase_steps,
            "radius_cap": self.radius_cap,
            "refine_tol": self.refine_tol,
        }


@dataclass(frozen=True)
class DephasingScan:
    """Outcome of the |w| search. `singular` marks the closed-form branch."""
    w_min: float
    epsilon_kT: float
    phase: float
    singular: bool = False


@dataclass(frozen=True)
class ThermoReport:
    landauer_kT: float
    epsilon_lower_kT: float
    total_lower_kT: float
    verdict: object
    w_min: float | None = None
    bounding_quadruple: tuple | None = None
    bound_computed: bool = True
    warnings: tuple = ()
    lambda_in: tuple = ()
    lambda_out: tuple = ()
    operation: str = ""
    units: str = "kT"

    def to_dict(self):
        stochastic_map = self.verdict.stochastic_map
        return {
            "units": self.units,
            "operation": self.operation,
            "landauer_kT": self.landauer_kT,
            "epsilon_lower_kT": self.epsilon_lower_kT,
            "total_lower_kT": self.total_lower_kT,
            "verdict": self.verdict.kind.value,
            "details": self.verdict.details,
            "bound_computed": self.bound_computed,
            "w_min": self.w_min,
            "bounding_quadruple": list(self.bounding_quadruple) if self.bounding_quadruple else None,
            "stochastic_map": stochastic_map.to_list() if stochastic_map is not None else None,
            "symmetries": [s.to_dict() for s in self.verdict.symmetries],
            "lambda_in": list(self.lambda_in),
            "lambda_out": list(self.lambda_out),
            "warnings": list(self.warnings),
        }


# =============================================================================
# Landauer term
# =============================================================================

def landauer_term(e, q):
    """ln2 * [S(rho_S) - S(rho'_S)] in kT."""
    return LN2 * (entropy(average_state(e)) - entropy(output_average(e, q)))


# =============================================================================
# Off-diagonal bound
# =============================================================================

def _best_offdiag(a):
    if outputs_codiagonal(a):
        raise ContractError("off-diagonal bound needs an output coherence above 1e-9")
    best = None
    for c in offdiag_candidates(a):
        if c.blocked:
            log("Bounds", f"candidate (n={c.n}, k={c.k}, l={c.l}) forced to 0: "
                          f"divergent denominator at (i, j) in {list(c.blocked_by)}")
        if best is None or c.value > best.value:
            best = c
    return best


def offdiag_bound(a):
    """Half the square of the best trace-norm bound over all output coherences."""
    best = _best_offdiag(a)
    return 0.5 * best.value ** 2


# =============================================================================
# Qubit scan
# =============================================================================

def _scan_system(a):
    if a.dim_in != 2 or a.dim_out != 2:
        raise ContractError(f"dephasing scan needs a qubit operation, got {a.dim_in} -> {a.dim_out}")
    if not outputs_codiagonal(a):
        raise ContractError("dephasing scan needs co-diagonal outputs")
    m = np.real(a.mu_in[:, 0, 0])
    M = np.column_stack([m, np.real(a.mu_in[:, 1, 1])])
    coherence = a.mu_in[:, 0, 1]
    target = np.real(a.mu_out[:, 0, 0])
    return m, M, coherence, target


def _ray_bounds(alpha, beta, lo, hi):
    """Per ray, the r-interval where lo <= alpha + beta * r <= hi for every column."""
    flat = np.abs(beta) < _FLAT_SLOPE
    safe = np.where(flat, 1.0, beta)
    r1 = (lo - alpha) / safe
    r2 = (hi - alpha) / safe
    inside = (alpha >= lo) & (alpha <= hi)
    start = np.where(flat, np.where(inside, -np.inf, np.inf), np.minimum(r1, r2))
    stop = np.where(flat, np.where(inside, np.inf, -np.inf), np.maximum(r1, r2))
    return start.max(axis=1), stop.min(axis=1)


def _admissible_radii(M, coherence, target, phases):
    """[r_lo, r_hi] per phase where the solved q11, q12 lie in [0, 1]."""
    pinv = np.linalg.pinv(M)
    directions = np.exp(1j * phases)
    # rhs(r) = target - r * c(phase)
    c = 2.0 * np.real(coherence[None, :] * directions[:, None])
    alpha = pinv @ target
    beta = -(c @ pinv.T)
    lo = np.full(2, -Q_RANGE_TOL)
    hi = np.full(2, 1.0 + Q_RANGE_TOL)
    start, stop = _ray_bounds(alpha, beta, lo, hi)

    if M.shape[0] > 2:
        # Overdetermined: the solved q must also reproduce every signal.
        K = M @ pinv - np.eye(M.shape[0])
        res_alpha = K @ target
        res_beta = -(c @ K.T)
        tol = np.full(M.shape[0], CONSISTENCY_TOL)
        r_start, r_stop = _ray_bounds(res_alpha, res_beta, -tol, tol)
        start = np.maximum(start, r_start)
        stop = np.minimum(stop, r_stop)
    return np.maximum(start, 0.0), stop


def _grid_scan(M, coherence, target, cfg):
    phases = 2.0 * np.pi * np.arange(cfg.phase_steps) / cfg.phase_steps
    r_lo, r_hi = _admissible_radii(M, coherence, target, phases)
    step = cfg.radius_step

    with np.errstate(invalid="ignore", over="ignore"):
        k = np.ceil(r_lo / step - _GRID_SLACK)
    k = np.where(np.isfinite(k), np.maximum(k, 0.0), np.inf)
    radius = k * step
    ok = (r_lo <= r_hi) & (radius <= r_hi + _GRID_SLACK * step) & (radius <= cfg.radius_cap + _GRID_SLACK * step)
    if not np.any(ok):
        warn("Bounds", f"scan exhausted: no admissible w up to |w| = {cfg.radius_cap}")
        raise ScanExhaustedError(cfg.radius_cap)

    k_hit = np.where(ok, k, np.inf)
    best = int(np.argmin(k_hit))  # argmin returns the lowest phase index on ties
    k_star = int(k_hit[best])
    if k_star == 0:
        return 0.0, float(phases[best])

    lo = (k_star - 1) * step
    hi = k_star * step
    while hi - lo > cfg.refine_tol:
        mid = 0.5 * (lo + hi)
        if np.any((r_lo <= mid) & (mid <= r_hi)):
            hi = mid
        else:
            lo = mid
    hit = np.flatnonzero((r_lo <= hi) & (hi <= r_hi))
    phase = float(phases[hit[0]]) if hit.size else float(phases[best])
    return float(hi), phase


def _singular_scan(coherence, target, cfg):
    """Closed-form minimum |w| when every signal has the same first diagonal entry.

    The constraint rows then coincide, so every signal must see the same
    right-hand side c(w) = target_1 - 2 Re(mu_12 w), and q11, q12 in [0, 1]
    exist iff c(w) lies in [0, 1].
    """
    delta = coherence[1:] - coherence[0]
    h = target[1:] - target[0]
    G = 2.0 * np.column_stack([np.real(delta), -np.imag(delta)]) if delta.size else np.zeros((0, 2))
    g = 2.0 * np.array([np.real(coherence[0]), -np.imag(coherence[0])])

    def rhs(z):
        return target[0] - float(g @ z)

    def within(value):
        return -Q_RANGE_TOL <= value <= 1.0 + Q_RANGE_TOL

    rank = int(np.linalg.matrix_rank(G, tol=1e-12)) if G.size else 0
    if rank == 0:
        if h.size and np.max(np.abs(h)) > CONSISTENCY_TOL:
            raise DegenerateDiagonalsError("equal input diagonals and coherences but different outputs")
        z0 = np.zeros(2)
        direction = g
    else:
        z0 = np.linalg.pinv(G) @ h
        if np.max(np.abs(G @ z0 - h)) > CONSISTENCY_TOL:
            raise DegenerateDiagonalsError("no w reproduces the output diagonals of every signal")
        if rank == 2:
            if not within(rhs(z0)):
                raise ScanExhaustedError(cfg.radius_cap)
            return z0
        _, _, vh = np.linalg.svd(G)
        direction = vh[-1]

    # Slide along `direction` (orthogonal to z0) until c(w) re-enters [0, 1].
    value = rhs(z0)
    if within(value):
        return z0
    slope = float(g @ direction)
    if abs(slope) < _FLAT_SLOPE:
        raise ScanExhaustedError(cfg.radius_cap)
    if rank == 0:
        direction = direction / np.linalg.norm(direction)
        slope = float(g @ direction)
    boundary = 1.0 if value > 1.0 else 0.0
    t = (value - boundary) / slope
    return z0 + t * direction


def scan_dephasing(a, cfg=None):
    cfg = cfg or ScanConfig()
    m, M, coherence, target = _scan_system(a)

    singular = bool(np.max(m) - np.min(m) <= SINGULAR_DIAGONAL_TOL)
    if singular:
        z = _singular_scan(coherence, target, cfg)
        w_min = float(np.hypot(z[0], z[1]))
        phase = float(math.atan2(z[1], z[0])) if w_min > 0.0 else 0.0
        if w_min > cfg.radius_cap:
            warn("Bounds", f"scan exhausted: closed-form |w| = {w_min:.6g} exceeds {cfg.radius_cap}")
            raise ScanExhaustedError(cfg.radius_cap)
    else:
        w_min, phase = _grid_scan(M, coherence, target, cfg)

    gap = float(a.lambda_in[0] - a.lambda_in[1])
    epsilon = 0.5 * gap * gap * w_min * w_min
    return DephasingScan(w_min=w_min, epsilon_kT=epsilon, phase=phase, singular=singular)


def dephasing_excess(a, cfg=None):
    """(w_min, epsilon_kT) for a qubit operation with co-diagonal outputs."""
    result = scan_dephasing(a, cfg)
    return result.w_min, result.epsilon_kT


# =============================================================================
# Dispatch
# =============================================================================

def analyze(e, q, cfg=None):
    cfg = cfg or ScanConfig()
    a = align(e, q)
    verdict = classify(a)
    landauer = landauer_term(e, q)

    warnings = []
    if a.degeneracy_warning:
        warnings.append("degenerate spectrum: coefficients depend on the chosen eigenbasis")

    epsilon = 0.0
    w_min = None
    quadruple = None
    bound_computed = True

    if verdict.kind is VerdictKind.SYMMETRIC_INCONCLUSIVE:
        warnings.append("inconclusive: every bounding quadruple is an eigenvalue-ratio symmetry")
    elif verdict.kind is VerdictKind.IRREVERSIBLE_OFFDIAGONAL:
        best = _best_offdiag(a)
        epsilon = 0.5 * best.value ** 2
        quadruple = (best.n, best.k, best.l)
    elif verdict.kind is VerdictKind.IRREVERSIBLE_DIAGONAL:
        if a.dim_in == 2 and a.dim_out == 2:
            scan = scan_dephasing(a, cfg)
            epsilon = scan.epsilon_kT
            w_min = scan.w_min
        else:
            bound_computed = False
            warnings.append("lower bound not computed: diagonal minimax beyond qubits is inconclusive")

    total = landauer + epsilon
    if total < 0.0:
        warnings.append(NEGATIVE_TOTAL_WARNING)
        log("Bounds", f"total {total:.6g} kT < 0: the operation may still extract energy from the bath")

    return ThermoReport(
        landauer_kT=float(landauer),
        epsilon_lower_kT=float(epsilon),
        total_lower_kT=float(total),
        verdict=verdict,
        w_min=w_min,
        bounding_quadruple=quadruple,
        bound_computed=bound_computed,
        warnings=tuple(warnings),
        lambda_in=tuple(float(x) for x in a.lambda_in),
        lambda_out=tuple(float(x) for x in a.lambda_out),
        operation=q.label,
    )
