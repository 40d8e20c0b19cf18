"""Dynamics — concurrence and other observables, second-order TEBD evolution."""

from xxz_quench.dynamics.observables import (
    ConcurrenceValue,
    concurrence,
    concurrence_profile,
    energy,
    magnetization_profile,
    validate_density_matrix,
)
from xxz_quench.dynamics.tebd import (
    EvolutionRecord,
    GateLayers,
    Observation,
    StepReport,
    TrotterSchedule,
    build_gate_layers,
    evolve,
    observe,
    refresh_canonical_form,
    trotter_step,
)

__all__ = [
    "ConcurrenceValue",
    "EvolutionRecord",
    "GateLayers",
    "Observation",
    "StepReport",
    "TrotterSchedule",
    "build_gate_layers",
    "concurrence",
    "concurrence_profile",
    "energy",
    "evolve",
    "magnetization_profile",
    "observe",
    "refresh_canonical_form",
    "trotter_step",
    "validate_density_matrix",
]
