"""Matrix product states — storage, canonical form, gates, reductions, snapshots."""

from xxz_quench.mps.snapshot import load_snapshot, save_snapshot
from xxz_quench.mps.state import (
    DensityMatrix4,
    MpsState,
    Spin,
    TruncationParams,
    TruncationReport,
    apply_two_site_gate,
    bond_dimensions,
    canonical_residual,
    canonicalize,
    domain_wall_pattern,
    neel_pattern,
    norm,
    product_state,
    single_site_rdm,
    to_statevector,
    two_site_rdm,
)

__all__ = [
    "DensityMatrix4",
    "MpsState",
    "Spin",
    "TruncationParams",
    "TruncationReport",
    "apply_two_site_gate",
    "bond_dimensions",
    "canonical_residual",
    "canonicalize",
    "domain_wall_pattern",
    "load_snapshot",
    "neel_pattern",
    "norm",
    "product_state",
    "save_snapshot",
    "single_site_rdm",
    "to_statevector",
    "two_site_rdm",
]
