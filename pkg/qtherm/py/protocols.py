"""
Quasi-static cost ledgers for the two reversible protocols.

standard_protocol_ledger: reshape the energy levels until the input is
canonical, move isothermally to the levels that make the output canonical,
flatten the levels again, rotate. Works for any pair of full-support states.

special_case_protocol_ledger: correlate an auxiliary with the input
eigenbasis, convert each basis state to its column of the stochastic map,
then reset the auxiliary conditioned on the system. Works whenever the
reversibility equations have a solution.

Both totals equal ln2 * [S(rho) - S(rho')] in kT exactly; the ledgers exist so
that identity can be checked step by step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DimensionError, SupportError, ValidationError
from .qmat import SUPPORT_CUTOFF, as_density_matrix, hermitian_part, shannon_entropy
from .reversibility import MAP_TOL, StochasticMap, map_residual

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ProtocolLedger:
    steps: tuple  # (label, energy in kT)

    @property
    def total_kT(self):
        return math.fsum(energy for _, energy in self.steps)

    def energies(self):
        return [energy for _, energy in self.steps]

    def to_dict(self):
        return {
            "units": "kT",
            "steps": [{"label": label, "energy_kT": energy} for label, energy in self.steps],
            "total_kT": self.total_kT,
        }


def _full_support_spectrum(rho, name):
    m = as_density_matrix(rho, name)
    vals = np.linalg.eigvalsh(hermitian_part(m))[::-1]
    if vals[-1] <= SUPPORT_CUTOFF:
        raise SupportError(f"{name} has eigenvalue {vals[-1]:.3e}; the level-shaping protocol needs full support")
    return vals


def _log_partition(energies):
    shift = energies.min()
    return float(-shift + np.log(np.sum(np.exp(-(energies - shift)))))


def standard_protocol_ledger(rho, rho_prime, offset_in=0.0, offset_out=0.0):
    """Six-step ledger; the offsets shift every level and leave the total unchanged."""
    lam = _full_support_spectrum(rho, "input state")
    lam_out = _full_support_spectrum(rho_prime, "output state")
    if lam.size != lam_out.size:
        raise DimensionError(f"input dim {lam.size} and output dim {lam_out.size} differ")

    levels = -np.log(lam) + float(offset_in)
    levels_out = -np.log(lam_out) + float(offset_out)

    quench = math.fsum(lam * levels)
    isothermal = _log_partition(levels) - _log_partition(levels_out)
    restore = -math.fsum(lam_out * levels_out)

    return ProtocolLedger(steps=(
        ("quench levels to make the input canonical", quench),
        ("couple to the heat bath", 0.0),
        ("isothermal shift to the output levels", isothermal),
        ("decouple from the heat bath", 0.0),
        ("restore levels to zero", restore),
        ("rotate to the output eigenbasis", 0.0),
    ))


def _as_map(p):
    return p.p if isinstance(p, StochasticMap) else np.asarray(p, dtype=float)


def special_case_protocol_ledger(a, p, probs=None):
    """Correlate / convert / reset ledger driven by a stochastic map P(k|i)."""
    pm = _as_map(p)
    if pm.shape != (a.dim_out, a.dim_in):
        raise DimensionError(f"stochastic map has shape {pm.shape}, expected {(a.dim_out, a.dim_in)}")
    probs = a.probabilities if probs is None else np.asarray(probs, dtype=float).reshape(-1)
    if probs.shape[0] != a.n_signals:
        raise ValidationError(f"got {probs.shape[0]} probabilities for {a.n_signals} signals")

    residual = map_residual(a, pm)
    if residual > MAP_TOL:
        raise ContractError(f"stochastic map does not implement the operation (residual {residual:.3e})")

    # lambda_i = sum_n p_n mu^n_ii
    lam = np.einsum("n,ni->i", probs, np.real(np.diagonal(a.mu_in, axis1=1, axis2=2)))
    convert = -LN2 * math.fsum(lam[i] * shannon_entropy(pm[:, i]) for i in range(a.dim_in))

    joint = pm * lam[None, :]  # P(k|i) lambda_i
    marginal = joint.sum(axis=1)
    reset_terms = []
    for k in range(a.dim_out):
        if marginal[k] <= 0.0:
            continue
        reset_terms.append(marginal[k] * shannon_entropy(joint[k] / marginal[k]))
    reset = LN2 * math.fsum(reset_terms)

    return ProtocolLedger(steps=(
        ("correlate auxiliary with the input eigenbasis", 0.0),
        ("convert each eigenstate to its map column", convert),
        ("reset the auxiliary conditioned on the output", reset),
    ))
