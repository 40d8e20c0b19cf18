"""Exact-diagonalization reference for small chains."""

from xxz_quench.oracle.exact import (
    DenseState,
    ExactPropagator,
    OracleComparison,
    compare_with_ed,
    ed_concurrence_profile,
    ed_energy,
    ed_evolve,
    ed_magnetization_profile,
    ed_two_site_rdm,
    full_hamiltonian,
    product_dense_state,
)

__all__ = [
    "DenseState",
    "ExactPropagator",
    "OracleComparison",
    "compare_with_ed",
    "ed_concurrence_profile",
    "ed_energy",
    "ed_evolve",
    "ed_magnetization_profile",
    "ed_two_site_rdm",
    "full_hamiltonian",
    "product_dense_state",
]
