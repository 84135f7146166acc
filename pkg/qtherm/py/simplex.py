"""
Dense phase-I simplex for linear feasibility problems.

Finds x >= 0 with A x = b, or shows none exists, by minimizing the sum of
artificial variables on a full tableau. Pivoting follows Bland's rule
(lowest-index entering column, lowest-index basic variable among ratio ties)
so the method cannot cycle and is fully deterministic.

Problems here are tiny (at most a few dozen variables), so clarity wins over
revised-simplex bookkeeping.
Used by: reversibility.find_stochastic_map
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

FEASIBILITY_TOL = 1e-9
REDUCED_COST_TOL = 1e-11
PIVOT_TOL = 1e-12
ILL_CONDITIONED_PIVOT = 1e-10
_RATIO_TIE_TOL = 1e-12


@dataclass(frozen=True)
class PhaseOneResult:
    feasible: bool
    x: np.ndarray
    objective: float        # sum of artificial variables at the optimum
    residual: float         # max |A x - b|
    iterations: int
    ill_conditioned: bool   # some pivot element fell below ILL_CONDITIONED_PIVOT


def _pivot_col(T, n_cols):
    """Bland: the first column with a negative reduced cost."""
    costs = T[-1, :n_cols]
    candidates = np.flatnonzero(costs < -REDUCED_COST_TOL)
    if candidates.size == 0:
        return None
    return int(candidates[0])


def _pivot_row(T, basis, col):
    """Minimum-ratio row; ties go to the lowest basic variable index."""
    column = T[:-1, col]
    eligible = np.flatnonzero(column > PIVOT_TOL)
    if eligible.size == 0:
        return None
    ratios = T[eligible, -1] / column[eligible]
    best = ratios.min()
    ties = eligible[ratios <= best + _RATIO_TIE_TOL * (1.0 + abs(best))]
    return int(min(ties, key=lambda r: basis[r]))


def _apply_pivot(T, basis, row, col):
    T[row, :] = T[row, :] / T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r, :] = T[r, :] - T[r, col] * T[row, :]
    basis[row] = col


def phase_one(A, b, tol=FEASIBILITY_TOL, max_iterations=None):
    """Search for x >= 0 with A x = b."""
    A = np.array(A, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True).reshape(-1)
    if A.ndim != 2 or A.shape[0] != b.shape[0]:
        raise DimensionError(f"constraint matrix {A.shape} does not match right-hand side {b.shape}")
    m, n = A.shape
    A_orig = A.copy()
    b_orig = b.copy()

    flip = b < 0.0
    A[flip] *= -1.0
    b[flip] *= -1.0

    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    # Reduced costs of "minimize the sum of artificials" with the artificials basic.
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = list(range(n, n + m))

    limit = max_iterations or 50 * (n + m) + 100
    min_pivot = np.inf
    iterations = 0
    while iterations < limit:
        col = _pivot_col(T, n + m)
        if col is None:
            break
        row = _pivot_row(T, basis, col)
        if row is None:
            # Phase I is bounded below by zero, so this only happens on noise.
            break
        min_pivot = min(min_pivot, abs(T[row, col]))
        _apply_pivot(T, basis, row, col)
        iterations += 1

    x = np.zeros(n)
    for r, var in enumerate(basis):
        if var < n:
            x[var] = max(T[r, -1], 0.0)

    objective = float(-T[m, -1])
    residual = float(np.max(np.abs(A_orig @ x - b_orig))) if m else 0.0
    feasible = objective <= tol * max(1, m) and residual <= tol * max(1, m)
    return PhaseOneResult(
        feasible=bool(feasible),
        x=x,
        objective=objective,
        residual=residual,
        iterations=iterations,
        ill_conditioned=bool(min_pivot < ILL_CONDITIONED_PIVOT),
    )
