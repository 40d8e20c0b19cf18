"""Spin model — Pauli algebra, XXZ bond terms and Trotter gates."""

from xxz_quench.model.spin_model import (
    Axis,
    BondGate,
    BondOperator,
    CouplingParams,
    bond_gate,
    bond_hamiltonian,
    pauli,
)

__all__ = [
    "Axis",
    "BondGate",
    "BondOperator",
    "CouplingParams",
    "bond_gate",
    "bond_hamiltonian",
    "pauli",
]
