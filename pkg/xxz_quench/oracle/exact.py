"""
Exact Diagonalization Oracle — Dense reference evolution for small chains.

The full Hamiltonian is assembled as a sparse sum of embedded bond terms and
diagonalized once; |ψ(t)⟩ = V·exp(−iEt)·V†|ψ₀⟩ is then exact at every time,
with no time-discretization error. Comparing TEBD against it isolates the
Trotter and truncation errors of the MPS pipeline.

Basis: lexicographic ↑/↓ with site 0 the most significant index and ↑ = 0,
the same ordering `to_statevector` produces.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from xxz_quench.dynamics.observables import concurrence
from xxz_quench.dynamics.tebd import TrotterSchedule, evolve
from xxz_quench.errors import SiteIndexError, SystemSizeError
from xxz_quench.model.spin_model import CouplingParams, bond_hamiltonian
from xxz_quench.mps.state import (
    DensityMatrix4,
    Spin,
    TruncationParams,
    product_state,
)

logger = logging.getLogger(__name__)

HAMILTONIAN_MAX_SITES = 14
EVOLUTION_MAX_SITES = 12


# ════════════════════════════════════════════════════════════════
# Dense states
# ════════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class DenseState:
    """Amplitudes of an N-site chain in the lexicographic ↑/↓ basis."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        n_sites = int(round(np.log2(amplitudes.size))) if amplitudes.size else 0
        if amplitudes.size < 2 or 2**n_sites != amplitudes.size:
            raise ValueError(f"State length {amplitudes.size} is not a power of two ≥ 2")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def n_sites(self) -> int:
        return int(round(np.log2(self.amplitudes.size)))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def product_dense_state(pattern: Sequence[Spin | int]) -> DenseState:
    """Dense basis vector of a σᶻ product state."""
    index = 0
    for spin in pattern:
        index = 2 * index + int(Spin(spin))
    amplitudes = np.zeros(2 ** len(pattern), dtype=complex)
    amplitudes[index] = 1.0
    return DenseState(amplitudes=amplitudes)


# ════════════════════════════════════════════════════════════════
# Hamiltonian and evolution
# ════════════════════════════════════════════════════════════════


def full_hamiltonian(params: CouplingParams) -> sparse.csr_matrix:
    """
    Sparse 2^N × 2^N Hamiltonian of the open chain.

    Raises:
        SystemSizeError: If N exceeds 14.
    """
    n = params.n_sites
    if n > HAMILTONIAN_MAX_SITES:
        raise SystemSizeError(f"Full Hamiltonian limited to {HAMILTONIAN_MAX_SITES} sites, got {n}")
    h = sparse.csr_matrix(bond_hamiltonian(params).matrix)
    total = sparse.csr_matrix((2**n, 2**n), dtype=complex)
    for i in range(n - 1):
        left = sparse.identity(2**i, dtype=complex, format="csr")
        right = sparse.identity(2 ** (n - i - 2), dtype=complex, format="csr")
        total = total + sparse.kron(sparse.kron(left, h), right, format="csr")
    return total.tocsr()


class ExactPropagator:
    """Eigendecomposition of H, reusable across initial states and times."""

    def __init__(self, params: CouplingParams) -> None:
        if params.n_sites > EVOLUTION_MAX_SITES:
            raise SystemSizeError(
                f"Exact evolution limited to {EVOLUTION_MAX_SITES} sites, got {params.n_sites}"
            )
        self.params = params
        self.hamiltonian = full_hamiltonian(params)
        self.energies, self.vectors = np.linalg.eigh(self.hamiltonian.toarray())

    def evolve(self, psi0: DenseState, times: Sequence[float]) -> list[DenseState]:
        if psi0.n_sites != self.params.n_sites:
            raise ValueError(
                f"State has {psi0.n_sites} sites, Hamiltonian {self.params.n_sites}"
            )
        coefficients = self.vectors.conj().T @ psi0.amplitudes
        states = []
        for t in times:
            if t == 0:
                states.append(psi0)
                continue
            phases = np.exp(-1j * self.energies * t)
            states.append(DenseState(amplitudes=self.vectors @ (phases * coefficients)))
        return states


def ed_evolve(
    psi0: DenseState, params: CouplingParams, times: Sequence[float]
) -> list[DenseState]:
    """
    Exact states exp(−iHt)|ψ₀⟩ for each requested time.

    Raises:
        SystemSizeError: If N exceeds 12.
    """
    return ExactPropagator(params).evolve(psi0, times)


# ════════════════════════════════════════════════════════════════
# Observables of dense states
# ════════════════════════════════════════════════════════════════


def ed_two_site_rdm(psi: DenseState, i: int) -> DensityMatrix4:
    """
    Partial trace over every site except (i, i+1), 0-based.

    Raises:
        SiteIndexError: If the pair lies outside the chain.
    """
    n = psi.n_sites
    if not 0 <= i <= n - 2:
        raise SiteIndexError(f"Index {i} outside 0..{n - 2}")
    blocks = psi.amplitudes.reshape(2**i, 4, 2 ** (n - i - 2))
    rho = np.einsum("aib,ajb->ij", blocks, blocks.conj())
    return DensityMatrix4(matrix=rho / np.real(np.trace(rho)))


def ed_concurrence_profile(psi: DenseState) -> np.ndarray:
    return np.array(
        [concurrence(ed_two_site_rdm(psi, i)).value for i in range(psi.n_sites - 1)]
    )


def ed_magnetization_profile(psi: DenseState) -> np.ndarray:
    n = psi.n_sites
    probabilities = np.abs(psi.amplitudes.reshape([2] * n)) ** 2
    values = np.empty(n)
    for i in range(n):
        marginal = probabilities.sum(axis=tuple(k for k in range(n) if k != i))
        values[i] = marginal[0] - marginal[1]
    return values


def ed_energy(psi: DenseState, hamiltonian: sparse.spmatrix) -> float:
    return float(np.real(np.vdot(psi.amplitudes, hamiltonian @ psi.amplitudes)))


# ════════════════════════════════════════════════════════════════
# TEBD-vs-ED comparison
# ════════════════════════════════════════════════════════════════


@dataclass(frozen=True)
class OracleComparison:
    """Largest deviations between TEBD and exact observables over a run."""

    n_sites: int
    j_z: float
    dt: float
    t_max: float
    times: np.ndarray
    tebd_concurrence: np.ndarray
    exact_concurrence: np.ndarray
    max_concurrence_deviation: float
    max_magnetization_deviation: float
    max_energy_deviation: float


def compare_with_ed(
    pattern: Sequence[Spin | int],
    params: CouplingParams,
    dt: float = 0.025,
    t_max: float = 10.0,
    observe_stride: int = 4,
    max_bond_dim: int = 60,
    discarded_weight_target: float = 0.0,
) -> OracleComparison:
    """
    Evolve a product state with TEBD and exactly, and compare observables.

    With the default truncation (m=60, no weight threshold) no truncation is
    possible for N ≤ 12, so the deviation is pure Trotter error.

    Args:
        pattern: Initial product state, one Spin per site.
        params: Post-quench couplings (n_sites ≤ 12).
        dt: Trotter step.
        t_max: Horizon.
        observe_stride: Steps between compared observations.
        max_bond_dim: TEBD bond-dimension cap.
        discarded_weight_target: TEBD discarded-weight target.

    Returns:
        OracleComparison with per-observable maximum absolute deviations.

    Raises:
        SystemSizeError: If n_sites exceeds the exact-evolution limit (checked
            before any TEBD work).
        ValueError: If the pattern length does not match the couplings.
    """
    if len(pattern) != params.n_sites:
        raise ValueError(f"Pattern has {len(pattern)} sites, couplings expect {params.n_sites}")
    schedule = TrotterSchedule(dt=dt, t_max=t_max, observe_stride=observe_stride)
    trunc = TruncationParams(
        max_bond_dim=max_bond_dim, discarded_weight_target=discarded_weight_target
    )
    propagator = ExactPropagator(params)
    record = evolve(product_state(pattern), params, schedule, trunc)

    times = np.array(record.times)
    exact_states = propagator.evolve(product_dense_state(pattern), times)
    exact_c = np.array([ed_concurrence_profile(psi) for psi in exact_states])
    exact_m = np.array([ed_magnetization_profile(psi) for psi in exact_states])
    exact_e = np.array([ed_energy(psi, propagator.hamiltonian) for psi in exact_states])

    tebd_c = record.concurrence
    comparison = OracleComparison(
        n_sites=params.n_sites,
        j_z=params.j_z,
        dt=dt,
        t_max=t_max,
        times=times,
        tebd_concurrence=tebd_c,
        exact_concurrence=exact_c,
        max_concurrence_deviation=float(np.max(np.abs(tebd_c - exact_c))),
        max_magnetization_deviation=float(np.max(np.abs(record.magnetization - exact_m))),
        max_energy_deviation=float(np.max(np.abs(np.array(record.energy) - exact_e))),
    )
    logger.info(
        "Oracle comparison N=%d j_z=%.3g dt=%.4g: max dC=%.3e",
        params.n_sites, params.j_z, dt, comparison.max_concurrence_deviation,
    )
    return comparison
