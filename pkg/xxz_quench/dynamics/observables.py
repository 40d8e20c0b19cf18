"""
Observables — Wootters concurrence, bond-concurrence and magnetization
profiles, and the energy of an MpsState.

Concurrence of a two-qubit density matrix ρ:

    C = max(λ₁ − λ₂ − λ₃ − λ₄, 0)

with λᵢ the descending square roots of the eigenvalues of
ρ·(σʸ⊗σʸ)·ρ*·(σʸ⊗σʸ). The complex conjugate ρ* is taken entrywise in the
fixed {↑↑, ↑↓, ↓↑, ↓↓} basis. The eigenvalues are obtained from the
Hermitian similar form √ρ·R·√ρ, R = (σʸ⊗σʸ)ρ*(σʸ⊗σʸ), whose spectrum is
real and non-negative up to round-off.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from xxz_quench.errors import InvalidDensityMatrixError
from xxz_quench.model.spin_model import Axis, CouplingParams, bond_hamiltonian, pauli
from xxz_quench.mps.state import DensityMatrix4, MpsState, single_site_rdm, two_site_rdm

logger = logging.getLogger(__name__)

CLAMP_TOLERANCE = 1e-10
CORRUPT_TOLERANCE = 1e-8
TRACE_TOLERANCE = 1e-8

_SPIN_FLIP = np.kron(pauli(Axis.Y), pauli(Axis.Y))


@dataclass(frozen=True)
class ConcurrenceValue:
    """Concurrence together with the four descending λ values it came from."""

    value: float
    lambdas: tuple[float, float, float, float]


def validate_density_matrix(rho: DensityMatrix4) -> None:
    """
    Check Hermiticity, unit trace and positivity of a two-site RDM.

    Raises:
        InvalidDensityMatrixError: If any invariant is violated beyond tolerance.
    """
    matrix = rho.matrix
    defect = float(np.max(np.abs(matrix - matrix.conj().T)))
    if defect > CLAMP_TOLERANCE:
        raise InvalidDensityMatrixError(f"Density matrix not Hermitian (defect {defect:.3e})")
    if abs(rho.trace - 1.0) > TRACE_TOLERANCE:
        raise InvalidDensityMatrixError(f"Density matrix trace {rho.trace:.12f} != 1")
    lowest = float(rho.eigenvalues()[0])
    if lowest < -CLAMP_TOLERANCE:
        raise InvalidDensityMatrixError(f"Density matrix not PSD (eigenvalue {lowest:.3e})")


def _clamp(eigenvalues: np.ndarray) -> np.ndarray:
    lowest = float(eigenvalues.min())
    if lowest < -CORRUPT_TOLERANCE:
        raise InvalidDensityMatrixError(
            f"Spin-flipped product has eigenvalue {lowest:.3e} below {-CORRUPT_TOLERANCE:.0e}"
        )
    if lowest < -CLAMP_TOLERANCE:
        logger.debug("Clamping eigenvalue %.3e outside round-off band", lowest)
    return np.clip(eigenvalues, 0.0, None)


def concurrence(rho: DensityMatrix4) -> ConcurrenceValue:
    """
    Wootters concurrence of a two-qubit density matrix.

    Args:
        rho: Two-site density matrix in the {↑↑, ↑↓, ↓↑, ↓↓} basis.

    Returns:
        ConcurrenceValue with C ∈ [0, 1] and λ₁ ≥ λ₂ ≥ λ₃ ≥ λ₄ ≥ 0.

    Raises:
        InvalidDensityMatrixError: If ρ is corrupt or ϱ has an eigenvalue
            below −1e-8.
    """
    validate_density_matrix(rho)
    matrix = 0.5 * (rho.matrix + rho.matrix.conj().T)

    w, v = np.linalg.eigh(matrix)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    flipped = _SPIN_FLIP @ matrix.conj() @ _SPIN_FLIP
    product = sqrt_rho @ flipped @ sqrt_rho
    product = 0.5 * (product + product.conj().T)

    eigenvalues = _clamp(np.linalg.eigvalsh(product))
    lambdas = np.sort(np.sqrt(eigenvalues))[::-1]
    value = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]
    return ConcurrenceValue(
        value=float(np.clip(value, 0.0, 1.0)),
        lambdas=(float(lambdas[0]), float(lambdas[1]), float(lambdas[2]), float(lambdas[3])),
    )


def concurrence_profile(state: MpsState) -> np.ndarray:
    """C_{i,i+1} for every bond of the chain (length n_sites − 1, 0-based)."""
    return np.array(
        [concurrence(two_site_rdm(state, i)).value for i in range(state.n_sites - 1)]
    )


def magnetization_profile(state: MpsState) -> np.ndarray:
    """⟨σᶻᵢ⟩ for every site (length n_sites)."""
    values = np.empty(state.n_sites)
    for i in range(state.n_sites):
        rho = single_site_rdm(state, i)
        values[i] = np.real(rho[0, 0] - rho[1, 1])
    return np.clip(values, -1.0, 1.0)


def energy(state: MpsState, params: CouplingParams) -> float:
    """⟨H⟩ as the sum of bond-term expectations over all n_sites − 1 bonds."""
    h = bond_hamiltonian(params).matrix
    total = 0.0
    for i in range(state.n_sites - 1):
        rho = two_site_rdm(state, i).matrix
        total += float(np.real(np.trace(rho @ h)))
    return total
