"""
Spin Model — Pauli operators, the XXZ bond Hamiltonian and its Trotter gates.

The chain Hamiltonian is a sum of identical nearest-neighbour bond terms

    h = J_xy (σˣ⊗σˣ + σʸ⊗σʸ) + J_z σᶻ⊗σᶻ

written with Pauli matrices (eigenvalues ±1), not spin-1/2 operators, so times
are measured in units of 1/J with Pauli couplings.

Every 4×4 matrix in the package uses the two-site basis {↑↑, ↑↓, ↓↑, ↓↓},
with ↑ the first local basis vector.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from xxz_quench.errors import NonHermitianOperatorError

HERMITIAN_TOLERANCE = 1e-10

# ════════════════════════════════════════════════════════════════
# Pauli operators
# ════════════════════════════════════════════════════════════════


class Axis(str, enum.Enum):
    """Pauli axis label."""

    X = "x"
    Y = "y"
    Z = "z"


_PAULI: dict[Axis, np.ndarray] = {
    Axis.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Axis.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Axis.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(axis: Axis | str) -> np.ndarray:
    """
    Return the 2×2 Pauli matrix for an axis in the {↑, ↓} basis.

    Args:
        axis: One of "x", "y", "z" (or the matching Axis member).

    Returns:
        A fresh complex array; callers may modify it.

    Raises:
        ValueError: If the axis is not x, y or z.
    """
    return _PAULI[Axis(axis)].copy()


# ════════════════════════════════════════════════════════════════
# Domain types
# ════════════════════════════════════════════════════════════════


class CouplingParams(BaseModel):
    """Couplings and length of an open XXZ chain."""

    model_config = ConfigDict(frozen=True)

    j_xy: float = Field(default=1.0, description="Coupling in the xy-plane")
    j_z: float = Field(default=1.0, description="Anisotropic coupling along z")
    n_sites: int = Field(default=60, ge=2, description="Chain length")


@dataclass(frozen=True)
class BondOperator:
    """A Hermitian 4×4 two-site operator in the {↑↑, ↑↓, ↓↑, ↓↓} basis."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (4, 4):
            raise ValueError(f"Bond operator must be 4×4, got {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


@dataclass(frozen=True)
class BondGate:
    """A 4×4 unitary two-site gate exp(−i·h·tau)."""

    matrix: np.ndarray
    tau: float = field(default=0.0)

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (4, 4):
            raise ValueError(f"Bond gate must be 4×4, got {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def unitarity_defect(self) -> float:
        """Max-entry deviation of U†U from the identity."""
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(4))))


# ════════════════════════════════════════════════════════════════
# Operations
# ════════════════════════════════════════════════════════════════


def bond_hamiltonian(params: CouplingParams) -> BondOperator:
    """
    Build the XXZ bond term J_xy(σˣσˣ + σʸσʸ) + J_z σᶻσᶻ.

    The result is real, Hermitian and block diagonal over the total-σᶻ
    sectors {↑↑}, {↑↓, ↓↑}, {↓↓}.
    """
    sx, sy, sz = pauli(Axis.X), pauli(Axis.Y), pauli(Axis.Z)
    h = params.j_xy * (np.kron(sx, sx) + np.kron(sy, sy)) + params.j_z * np.kron(sz, sz)
    # σˣσˣ + σʸσʸ is real; drop the +0j round-off of the σʸ product
    return BondOperator(matrix=np.real(h).astype(complex))


def bond_gate(h: BondOperator, tau: float) -> BondGate:
    """
    Exponentiate a bond operator into a Trotter gate exp(−i·h·tau).

    The exponential is taken through the exact spectral decomposition of the
    Hermitian 4×4 matrix, so the gate is unitary to machine precision and
    inherits the block structure of h.

    Args:
        h: Hermitian bond operator.
        tau: Time interval implemented by the gate.

    Returns:
        The BondGate.

    Raises:
        NonHermitianOperatorError: If ‖h − h†‖ exceeds 1e-10 entrywise.
    """
    defect = h.hermiticity_defect()
    if defect > HERMITIAN_TOLERANCE:
        raise NonHermitianOperatorError(
            f"Bond operator is not Hermitian: max |h - h†| = {defect:.3e}"
        )
    if tau == 0.0:
        return BondGate(matrix=np.eye(4, dtype=complex), tau=0.0)

    energies, vectors = np.linalg.eigh(h.matrix)
    phases = np.exp(-1j * energies * tau)
    matrix = (vectors * phases) @ vectors.conj().T
    return BondGate(matrix=matrix, tau=float(tau))
