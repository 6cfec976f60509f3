"""Process matrices over the Weyl operator basis and the depolarizing model.

The chain visibility -> mixing weight -> process fidelity quantifies phase
coherence of the cyclic-shift gate from a single interference fringe:
lambda = 2V / (3 - V) and F_P = (1 + 5V) / (9 - 3V) for three-level systems.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gates import generalized_x, weyl_operators
from .states import DensityMatrix, GateMatrix

HERMITICITY_TOL = 1e-10


@dataclass(frozen=True)
class ProcessMatrix:
    """chi matrix of a channel, indexed by flat Weyl indices (a*d + b)."""

    d: int
    chi: np.ndarray = field(repr=False)

    def __post_init__(self):
        chi = np.asarray(self.chi, dtype=complex)
        object.__setattr__(self, "chi", chi)
        n = self.d * self.d
        if chi.shape != (n, n):
            raise ValueError(f"chi has shape {chi.shape}, expected ({n}, {n})")
        if np.max(np.abs(chi - chi.conj().T)) > HERMITICITY_TOL:
            raise ValueError("chi matrix is not Hermitian")


@dataclass(frozen=True)
class DepolarizingModel:
    """Perfect unitary mixed with white noise: lambda U rho U^H + (1-lambda)/d I."""

    lam: float
    base_unitary: GateMatrix

    def __post_init__(self):
        if not (0.0 <= self.lam <= 1.0):
            raise ValueError(f"mixing weight must be in [0, 1], got {self.lam}")


def chi_ideal(k: int, d: int = 3) -> ProcessMatrix:
    """Process matrix of the ideal unitary at flat Weyl index k (one nonzero entry)."""
    n = d * d
    chi = np.zeros((n, n), dtype=complex)
    chi[k, k] = 1.0
    return ProcessMatrix(d, chi)


def chi_x(d: int = 3) -> ProcessMatrix:
    """Ideal cyclic-shift channel: single nonzero entry at the X slot (k = 1)."""
    return chi_ideal(1, d)


def chi_depolarizing(lam: float, d: int = 3) -> ProcessMatrix:
    """Cyclic shift plus white noise: lambda * chi_X + (1 - lambda)/d^2 * I."""
    if not (0.0 <= lam <= 1.0):
        raise ValueError(f"mixing weight must be in [0, 1], got {lam}")
    n = d * d
    chi = (1.0 - lam) / n * np.eye(n, dtype=complex)
    chi[1, 1] += lam
    return ProcessMatrix(d, chi)


def apply_process(p: ProcessMatrix, rho: DensityMatrix) -> DensityMatrix:
    """Channel action rho_out = sum_mn chi_mn U_m rho U_n^H."""
    if rho.dim != p.d:
        raise ValueError(f"state dimension {rho.dim} does not match channel dimension {p.d}")
    ops = [u.entries for u in weyl_operators(p.d)]
    out = np.zeros((p.d, p.d), dtype=complex)
    for m in range(len(ops)):
        for n in range(len(ops)):
            c = p.chi[m, n]
            if c != 0:
                out += c * ops[m] @ rho.entries @ ops[n].conj().T
    # clip the numerical dust so the DensityMatrix invariants hold
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(rho.dim, out)


def depolarize(model: DepolarizingModel, rho: DensityMatrix) -> DensityMatrix:
    """Direct evaluation of lambda U rho U^H + (1 - lambda)/d * I."""
    d = rho.dim
    if model.base_unitary.dim != d:
        raise ValueError(f"unitary dimension {model.base_unitary.dim} does not match state {d}")
    u = model.base_unitary.entries
    out = model.lam * (u @ rho.entries @ u.conj().T) + (1.0 - model.lam) / d * np.eye(d)
    return DensityMatrix(d, out)


def depolarize_x(lam: float, rho: DensityMatrix) -> DensityMatrix:
    """Convenience form with the cyclic shift as the base unitary."""
    return depolarize(DepolarizingModel(lam, generalized_x(rho.dim)), rho)


def lambda_from_visibility(v: float) -> float:
    """Mixing weight recovered from a three-bin fringe visibility: 2V / (3 - V)."""
    if not (0.0 <= v <= 1.0):
        raise ValueError(f"visibility must be in [0, 1], got {v}")
    return 2.0 * v / (3.0 - v)


def process_fidelity_from_visibility(v: float) -> float:
    """F_P = (1 + 5V) / (9 - 3V), the overlap of the noisy channel with the ideal."""
    if not (0.0 <= v <= 1.0):
        raise ValueError(f"visibility must be in [0, 1], got {v}")
    return (1.0 + 5.0 * v) / (9.0 - 3.0 * v)


def process_fidelity(chi_ideal_: ProcessMatrix, chi_actual: ProcessMatrix) -> float:
    """Trace inner product Tr(chi_ideal chi_actual)."""
    if chi_ideal_.d != chi_actual.d:
        raise ValueError(f"dimension mismatch: {chi_ideal_.d} vs {chi_actual.d}")
    return float(np.real(np.trace(chi_ideal_.chi @ chi_actual.chi)))


def process_fidelity_from_lambda(lam: float, d: int = 3) -> float:
    """Closed form (1 + (d^2 - 1) * lambda) / d^2; d=3 gives (1 + 8 lambda)/9."""
    n = d * d
    return (1.0 + (n - 1) * lam) / n
