"""
MPS State — Open-boundary matrix product state with explicit Schmidt weights.

Storage convention:
- `site_tensors[i]` has legs (left bond, physical, right bond); the physical
  leg is 0 for ↑ and 1 for ↓. Boundary bonds have dimension 1.
- Every site tensor is right-canonical (B = Γλ in Vidal's notation):
  contracting a tensor with its conjugate over the physical and right legs
  gives the identity on the left leg.
- `bond_weights[b]` holds the Schmidt coefficients across bond b, the cut
  between sites b and b+1, sorted descending with unit sum of squares.

With the weights stored on every bond, each bond is locally canonical at all
times: the two-site wavefunction of bond b is diag(λ_{b-1})·B_b·B_{b+1}, so
gate application, truncation and two-site reduced density matrices are local.

Sites and bonds are 0-based.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from xxz_quench.errors import CanonicalizationError, NonUnitaryGateError, SiteIndexError
from xxz_quench.model.spin_model import BondGate

logger = logging.getLogger(__name__)

PHYSICAL_DIM = 2
UNITARITY_TOLERANCE = 1e-6
DEGENERACY_TOLERANCE = 1e-12
# Schmidt values at or below this are treated as exact zeros
ZERO_WEIGHT = 1e-15
STATEVECTOR_MAX_SITES = 16


# ════════════════════════════════════════════════════════════════
# Domain types
# ════════════════════════════════════════════════════════════════


class Spin(enum.IntEnum):
    """Local basis state; the value is the physical-leg index."""

    UP = 0
    DOWN = 1


class TruncationParams(BaseModel):
    """Bond-dimension cap m and discarded-weight target δρ."""

    model_config = ConfigDict(frozen=True)

    max_bond_dim: int = Field(default=60, ge=1)
    discarded_weight_target: float = Field(default=1e-8, ge=0.0)


@dataclass(frozen=True)
class TruncationReport:
    """Outcome of one gate application."""

    bond: int
    discarded_weight: float
    new_bond_dim: int


@dataclass(frozen=True)
class DensityMatrix4:
    """Two-site reduced density matrix in the {↑↑, ↑↓, ↓↑, ↓↓} basis."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (4, 4):
            raise ValueError(f"Two-site density matrix must be 4×4, got {matrix.shape}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the Hermitian part, ascending."""
        hermitian = 0.5 * (self.matrix + self.matrix.conj().T)
        return np.linalg.eigvalsh(hermitian)


@dataclass
class MpsState:
    """
    Open-boundary MPS: right-canonical site tensors plus Schmidt weights per bond.

    Instances are single-writer: gate applications mutate them in place.
    """

    site_tensors: list[np.ndarray]
    bond_weights: list[np.ndarray]

    def __post_init__(self) -> None:
        if not self.site_tensors:
            raise ValueError("An MPS needs at least one site")
        if len(self.bond_weights) != len(self.site_tensors) - 1:
            raise ValueError(
                f"Expected {len(self.site_tensors) - 1} bond weight vectors, "
                f"got {len(self.bond_weights)}"
            )
        if self.site_tensors[0].shape[0] != 1 or self.site_tensors[-1].shape[2] != 1:
            raise ValueError("Boundary bonds of an open MPS must have dimension 1")
        for b, weights in enumerate(self.bond_weights):
            left, right = self.site_tensors[b], self.site_tensors[b + 1]
            if not (left.shape[2] == right.shape[0] == weights.shape[0]):
                raise ValueError(
                    f"Bond {b} dimension mismatch: {left.shape[2]}, "
                    f"{right.shape[0]}, {weights.shape[0]} weights"
                )

    @property
    def n_sites(self) -> int:
        return len(self.site_tensors)

    def left_weights(self, site: int) -> np.ndarray:
        """Schmidt weights on the bond to the left of a site (ones(1) at the edge)."""
        if site == 0:
            return np.ones(1)
        return self.bond_weights[site - 1]

    def copy(self) -> MpsState:
        return MpsState(
            site_tensors=[t.copy() for t in self.site_tensors],
            bond_weights=[w.copy() for w in self.bond_weights],
        )


# ════════════════════════════════════════════════════════════════
# Constructors
# ════════════════════════════════════════════════════════════════


def neel_pattern(n_sites: int) -> list[Spin]:
    """↑↓↑↓… starting with ↑ on the first site."""
    return [Spin.UP if i % 2 == 0 else Spin.DOWN for i in range(n_sites)]


def domain_wall_pattern(n_sites: int) -> list[Spin]:
    """↑ on the left half, ↓ on the right half."""
    half = n_sites // 2
    return [Spin.UP] * half + [Spin.DOWN] * (n_sites - half)


def product_state(pattern: Sequence[Spin | int]) -> MpsState:
    """
    Build the bond-dimension-1 MPS of a σᶻ product state.

    Args:
        pattern: One Spin per site.

    Returns:
        A normalized, canonical MpsState.

    Raises:
        ValueError: If the pattern is empty.
    """
    if len(pattern) == 0:
        raise ValueError("Product-state pattern must not be empty")
    tensors = []
    for spin in pattern:
        tensor = np.zeros((1, PHYSICAL_DIM, 1), dtype=complex)
        tensor[0, Spin(spin), 0] = 1.0
        tensors.append(tensor)
    weights = [np.ones(1) for _ in range(len(pattern) - 1)]
    return MpsState(site_tensors=tensors, bond_weights=weights)


# ════════════════════════════════════════════════════════════════
# Canonical form
# ════════════════════════════════════════════════════════════════


def canonicalize(state: MpsState) -> MpsState:
    """
    Return an equivalent MPS in exact canonical form.

    A left-to-right QR sweep moves the orthogonality centre to the last
    site; a right-to-left SVD sweep then produces right-canonical tensors and
    the exact Schmidt coefficients of every bond. Numerically zero Schmidt
    values are dropped, which never changes the represented state. The
    result is normalized.

    Raises:
        CanonicalizationError: If the state has zero norm or a bond weight
            vector underflows to all-zero.
    """
    tensors = [t.astype(complex, copy=True) for t in state.site_tensors]
    n = len(tensors)

    for i in range(n - 1):
        chi_l, d, chi_r = tensors[i].shape
        q, r = np.linalg.qr(tensors[i].reshape(chi_l * d, chi_r))
        tensors[i] = q.reshape(chi_l, d, q.shape[1])
        tensors[i + 1] = np.tensordot(r, tensors[i + 1], axes=(1, 0))

    total = np.linalg.norm(tensors[-1])
    if not np.isfinite(total) or total == 0.0:
        raise CanonicalizationError("Cannot canonicalize a state of zero norm")
    tensors[-1] = tensors[-1] / total

    weights: list[np.ndarray] = [np.ones(1)] * (n - 1)
    for i in range(n - 1, 0, -1):
        chi_l, d, chi_r = tensors[i].shape
        u, s, vh = np.linalg.svd(tensors[i].reshape(chi_l, d * chi_r), full_matrices=False)
        keep = int(np.count_nonzero(s > ZERO_WEIGHT))
        if keep == 0:
            raise CanonicalizationError(f"Bond {i - 1} weights underflow to zero")
        u, s, vh = u[:, :keep], s[:keep], vh[:keep]
        s = s / np.linalg.norm(s)
        tensors[i] = vh.reshape(keep, d, chi_r)
        tensors[i - 1] = np.tensordot(tensors[i - 1], u * s, axes=(2, 0))
        weights[i - 1] = s

    # Remaining phase and norm sit on the first tensor, which is (1, d, χ)
    tensors[0] = tensors[0] / np.linalg.norm(tensors[0])
    return MpsState(site_tensors=tensors, bond_weights=weights)


def canonical_residual(state: MpsState) -> float:
    """
    Largest deviation from the canonical-form conditions.

    Checks right-canonicality of every site tensor and that the stored
    weights reproduce the left environment: Σ λ² A†A over the left leg
    equals diag(λ_right²).
    """
    residual = 0.0
    for i, tensor in enumerate(state.site_tensors):
        chi_l = tensor.shape[0]
        right = np.einsum("asb,csb->ac", tensor, tensor.conj())
        residual = max(residual, float(np.max(np.abs(right - np.eye(chi_l)))))

        lam = state.left_weights(i)
        left = np.einsum("a,asb,asc->bc", lam**2, tensor.conj(), tensor)
        target = np.diag(state.bond_weights[i] ** 2) if i < state.n_sites - 1 else np.ones((1, 1))
        residual = max(residual, float(np.max(np.abs(left - target))))
    return residual


# ════════════════════════════════════════════════════════════════
# Gate application
# ════════════════════════════════════════════════════════════════


def _retained_rank(weights2: np.ndarray, trunc: TruncationParams) -> int:
    """
    Number of Schmidt values to keep from a normalized, descending s² vector.

    Numerically zero values are always dropped. Then cap at max_bond_dim
    and drop trailing values while their cumulative weight stays below the
    target; never below one. Values degenerate with the last kept one are
    kept while the cap allows.
    """
    nonzero = max(int(np.count_nonzero(weights2 > ZERO_WEIGHT**2)), 1)
    cap = min(nonzero, trunc.max_bond_dim)
    keep = cap
    tail = 0.0
    while keep > 1:
        candidate = tail + weights2[keep - 1]
        if candidate >= trunc.discarded_weight_target:
            break
        tail = candidate
        keep -= 1

    singular = np.sqrt(weights2)
    while keep < cap and singular[keep - 1] - singular[keep] <= DEGENERACY_TOLERANCE:
        keep += 1
    return keep


def apply_two_site_gate(
    state: MpsState,
    gate: BondGate,
    bond: int,
    trunc: TruncationParams,
) -> TruncationReport:
    """
    Apply a two-site gate on (bond, bond+1) in place and truncate.

    The gate is contracted into the two-site block, the block weighted by the
    left Schmidt values is split by SVD, and the retained singular values
    become the new weights of the bond, renormalized to unit sum of squares.
    The new left tensor is obtained by projecting the unweighted block onto
    the retained right singular vectors, which keeps it right-canonical
    without dividing by Schmidt values.

    Args:
        state: State to update (mutated).
        gate: Unitary 4×4 gate in the {↑↑, ↑↓, ↓↑, ↓↓} basis.
        bond: 0-based bond index, 0 ≤ bond ≤ n_sites − 2.
        trunc: Truncation controls.

    Returns:
        TruncationReport with the dropped squared weight and new dimension.

    Raises:
        SiteIndexError: If the bond is outside the chain.
        NonUnitaryGateError: If U†U deviates from identity beyond 1e-6.
    """
    if not 0 <= bond < state.n_sites - 1:
        raise SiteIndexError(f"Bond {bond} outside 0..{state.n_sites - 2}")
    defect = gate.unitarity_defect()
    if defect > UNITARITY_TOLERANCE:
        raise NonUnitaryGateError(f"Gate is not unitary: max |U†U - I| = {defect:.3e}")

    left, right = state.site_tensors[bond], state.site_tensors[bond + 1]
    chi_l, d, _ = left.shape
    chi_r = right.shape[2]

    block = np.tensordot(left, right, axes=(2, 0))  # (χl, s1, s2, χr)
    u4 = gate.matrix.reshape(d, d, d, d)  # (s1', s2', s1, s2)
    block = np.einsum("abij,xijy->xaby", u4, block)

    theta = state.left_weights(bond)[:, None, None, None] * block
    _, s, vh = np.linalg.svd(theta.reshape(chi_l * d, d * chi_r), full_matrices=False)

    total = float(np.sum(s**2))
    weights2 = s**2 / total
    keep = _retained_rank(weights2, trunc)
    discarded = float(np.sum(weights2[keep:]))

    kept = s[:keep]
    kept_norm = np.linalg.norm(kept)
    vh = vh[:keep]

    new_left = block.reshape(chi_l * d, d * chi_r) @ vh.conj().T / kept_norm
    state.site_tensors[bond] = new_left.reshape(chi_l, d, keep)
    state.site_tensors[bond + 1] = vh.reshape(keep, d, chi_r)
    state.bond_weights[bond] = kept / kept_norm

    if discarded > 0.0:
        logger.debug("Bond %d truncated to %d: discarded=%.3e", bond, keep, discarded)
    return TruncationReport(bond=bond, discarded_weight=discarded, new_bond_dim=keep)


# ════════════════════════════════════════════════════════════════
# Local reductions
# ════════════════════════════════════════════════════════════════


def _check_site(state: MpsState, site: int, last: int) -> None:
    if not 0 <= site <= last:
        raise SiteIndexError(f"Index {site} outside 0..{last}")


def two_site_rdm(state: MpsState, i: int) -> DensityMatrix4:
    """
    Reduced density matrix of sites (i, i+1), 0-based.

    Args:
        state: Canonical MPS.
        i: Left site of the pair, 0 ≤ i ≤ n_sites − 2.

    Returns:
        Unit-trace DensityMatrix4 in the {↑↑, ↑↓, ↓↑, ↓↓} basis.

    Raises:
        SiteIndexError: If the pair lies outside the chain.
    """
    _check_site(state, i, state.n_sites - 2)
    lam = state.left_weights(i)
    block = np.tensordot(state.site_tensors[i], state.site_tensors[i + 1], axes=(2, 0))
    theta = lam[:, None, None, None] * block
    chi_l, d, _, chi_r = theta.shape
    flat = theta.transpose(1, 2, 0, 3).reshape(d * d, chi_l * chi_r)
    rho = flat @ flat.conj().T
    return DensityMatrix4(matrix=rho / np.real(np.trace(rho)))


def single_site_rdm(state: MpsState, i: int) -> np.ndarray:
    """Unit-trace 2×2 reduced density matrix of site i."""
    _check_site(state, i, state.n_sites - 1)
    theta = state.left_weights(i)[:, None, None] * state.site_tensors[i]
    rho = np.einsum("asb,atb->st", theta, theta.conj())
    return rho / np.real(np.trace(rho))


def norm(state: MpsState) -> float:
    """
    ⟨ψ|ψ⟩^{1/2} by full transfer-matrix contraction.

    Does not assume canonical form, so it also measures scaled or
    non-canonical states.
    """
    env = np.ones((1, 1), dtype=complex)
    for tensor in state.site_tensors:
        env = np.einsum("ab,asc,bsd->cd", env, tensor, tensor.conj())
    return float(np.sqrt(max(np.real(env[0, 0]), 0.0)))


def bond_dimensions(state: MpsState) -> list[int]:
    return [len(w) for w in state.bond_weights]


def to_statevector(state: MpsState) -> np.ndarray:
    """
    Contract the MPS into a dense amplitude vector.

    Site 0 is the most significant index and ↑ is local index 0, matching
    the exact-diagonalization basis.
    """
    if state.n_sites > STATEVECTOR_MAX_SITES:
        raise ValueError(
            f"Refusing dense contraction of {state.n_sites} sites "
            f"(limit {STATEVECTOR_MAX_SITES})"
        )
    psi = state.site_tensors[0]
    for tensor in state.site_tensors[1:]:
        psi = np.tensordot(psi, tensor, axes=(-1, 0))
    return psi.reshape(-1)
