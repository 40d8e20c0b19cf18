"""
TEBD Engine — Second-order Trotter evolution of an MpsState under the XXZ chain.

One Trotter step of length dt applies, in order:

    odd-half   exp(−i h dt/2) on bonds 1, 3, 5, … (0-based 0, 2, 4, …)
    even-full  exp(−i h dt)   on bonds 2, 4, 6, … (0-based 1, 3, 5, …)
    odd-half   exp(−i h dt/2) on bonds 1, 3, 5, …

The bond labels "odd"/"even" follow the 1-based pair notation C_{i,i+1}.
Odd-half gates of consecutive steps are not merged, so the state is a valid
time-t state at every step boundary and observations need no gate surgery.

Gates within a layer act on disjoint bonds; the layers alternate their sweep
direction. Because Schmidt weights live on every bond, each gate sees a
locally canonical bond without extra canonicalization sweeps. Truncation
slowly erodes the global canonical form; before every observation whose
norm is off by more than 1e-10 the exact form is restored in place, so all
recorded observables are measured on a canonical, unit-norm state.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from xxz_quench.dynamics.observables import (
    concurrence_profile,
    energy,
    magnetization_profile,
)
from xxz_quench.errors import (
    CanonicalizationError,
    EvolutionAbortedError,
    InvalidDensityMatrixError,
)
from xxz_quench.model.spin_model import BondGate, CouplingParams, bond_gate, bond_hamiltonian
from xxz_quench.mps.state import (
    MpsState,
    TruncationParams,
    TruncationReport,
    apply_two_site_gate,
    bond_dimensions,
    canonicalize,
    norm,
)

logger = logging.getLogger(__name__)

NORM_DRIFT_LIMIT = 1e-4
# Drift above this at an observation triggers an exact canonical-form refresh
CANONICAL_REFRESH_TOLERANCE = 1e-10
DEFAULT_OBSERVE_STRIDE = 4


# ════════════════════════════════════════════════════════════════
# Domain types
# ════════════════════════════════════════════════════════════════


class TrotterSchedule(BaseModel):
    """Time step, horizon and observation stride of an evolution."""

    model_config = ConfigDict(frozen=True)

    dt: float = Field(default=0.025, gt=0.0)
    t_max: float = Field(default=40.0, ge=0.0)
    observe_stride: int = Field(default=DEFAULT_OBSERVE_STRIDE, ge=1)

    @model_validator(mode="after")
    def _horizon_reachable(self) -> TrotterSchedule:
        if 0.0 < self.t_max < self.dt:
            raise ValueError("t_max must be 0 or at least one time step dt")
        return self

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))

    def observation_steps(self) -> list[int]:
        """Steps at which observables are recorded: 0, stride, 2·stride, …"""
        return list(range(0, self.n_steps + 1, self.observe_stride))


@dataclass(frozen=True)
class GateLayers:
    """The two distinct gates of a homogeneous chain and the bonds they act on."""

    odd_half: BondGate
    even_full: BondGate
    odd_bonds: tuple[int, ...]
    even_bonds: tuple[int, ...]


@dataclass(frozen=True)
class StepReport:
    """Aggregated truncation outcome of one Trotter step."""

    discarded_weight: float
    max_bond_dim: int
    reports: tuple[TruncationReport, ...] = ()


@dataclass(frozen=True)
class Observation:
    """Observables of the state at one time."""

    step: int
    time: float
    concurrence: np.ndarray
    magnetization: np.ndarray
    energy: float
    norm: float
    discarded_weight_step: float
    discarded_weight_cum: float
    max_bond_dim: int


@dataclass
class EvolutionRecord:
    """Time series of observations, rows ordered by time."""

    steps: list[int] = field(default_factory=list)
    times: list[float] = field(default_factory=list)
    concurrence_profiles: list[np.ndarray] = field(default_factory=list)
    magnetization_profiles: list[np.ndarray] = field(default_factory=list)
    energy: list[float] = field(default_factory=list)
    norm: list[float] = field(default_factory=list)
    discarded_weight_step: list[float] = field(default_factory=list)
    cumulative_discarded_weight: list[float] = field(default_factory=list)
    max_bond_dim: list[int] = field(default_factory=list)

    def append(self, obs: Observation) -> None:
        self.steps.append(obs.step)
        self.times.append(obs.time)
        self.concurrence_profiles.append(obs.concurrence)
        self.magnetization_profiles.append(obs.magnetization)
        self.energy.append(obs.energy)
        self.norm.append(obs.norm)
        self.discarded_weight_step.append(obs.discarded_weight_step)
        self.cumulative_discarded_weight.append(obs.discarded_weight_cum)
        self.max_bond_dim.append(obs.max_bond_dim)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def concurrence(self) -> np.ndarray:
        """Matrix [observation × bond]."""
        return np.array(self.concurrence_profiles)

    @property
    def magnetization(self) -> np.ndarray:
        """Matrix [observation × site]."""
        return np.array(self.magnetization_profiles)

    def bond_series(self, bond: int) -> np.ndarray:
        """Concurrence of one 0-based bond over time."""
        return self.concurrence[:, bond]

    def site_series(self, site: int) -> np.ndarray:
        return self.magnetization[:, site]


Observer = Callable[[Observation], None]


# ════════════════════════════════════════════════════════════════
# Operations
# ════════════════════════════════════════════════════════════════


def build_gate_layers(params: CouplingParams, dt: float) -> GateLayers:
    """
    Build the symmetric second-order split for a homogeneous chain.

    Args:
        params: Chain couplings and length.
        dt: Trotter time step.

    Returns:
        GateLayers with exp(−i h dt/2) for the odd layer and exp(−i h dt)
        for the even layer.

    Raises:
        ValueError: If dt is not positive.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    h = bond_hamiltonian(params)
    n_bonds = params.n_sites - 1
    return GateLayers(
        odd_half=bond_gate(h, dt / 2),
        even_full=bond_gate(h, dt),
        odd_bonds=tuple(range(0, n_bonds, 2)),
        even_bonds=tuple(range(1, n_bonds, 2)),
    )


def refresh_canonical_form(state: MpsState) -> None:
    """Replace the tensors of a state by its exact canonical form, in place."""
    fresh = canonicalize(state)
    state.site_tensors[:] = fresh.site_tensors
    state.bond_weights[:] = fresh.bond_weights


def _apply_layer(
    state: MpsState,
    gate: BondGate,
    bonds: tuple[int, ...],
    trunc: TruncationParams,
    reverse: bool,
) -> list[TruncationReport]:
    order = reversed(bonds) if reverse else bonds
    return [apply_two_site_gate(state, gate, bond, trunc) for bond in order]


def trotter_step(state: MpsState, layers: GateLayers, trunc: TruncationParams) -> StepReport:
    """
    Advance the state by one second-order Trotter step in place.

    Returns:
        StepReport with the summed discarded weight of the step.
    """
    reports = _apply_layer(state, layers.odd_half, layers.odd_bonds, trunc, reverse=False)
    reports += _apply_layer(state, layers.even_full, layers.even_bonds, trunc, reverse=True)
    reports += _apply_layer(state, layers.odd_half, layers.odd_bonds, trunc, reverse=False)
    return StepReport(
        discarded_weight=float(sum(r.discarded_weight for r in reports)),
        max_bond_dim=max(bond_dimensions(state), default=1),
        reports=tuple(reports),
    )


def observe(
    state: MpsState,
    params: CouplingParams,
    step: int,
    time: float,
    discarded_step: float = 0.0,
    discarded_cum: float = 0.0,
) -> Observation:
    """
    Measure all recorded observables and run the health checks.

    Raises:
        EvolutionAbortedError: If the norm drifts beyond 1e-4 or a reduced
            density matrix is corrupt.
    """
    state_norm = norm(state)
    if abs(state_norm - 1.0) > NORM_DRIFT_LIMIT:
        raise EvolutionAbortedError(
            f"Norm drifted to {state_norm:.8f} at step {step} (t={time:.4f})",
            step=step,
            time=time,
        )
    try:
        profile = concurrence_profile(state)
    except InvalidDensityMatrixError as exc:
        raise EvolutionAbortedError(
            f"Reduced density matrix failed at step {step} (t={time:.4f}): {exc}",
            step=step,
            time=time,
        ) from exc
    return Observation(
        step=step,
        time=time,
        concurrence=profile,
        magnetization=magnetization_profile(state),
        energy=energy(state, params),
        norm=state_norm,
        discarded_weight_step=discarded_step,
        discarded_weight_cum=discarded_cum,
        max_bond_dim=max(bond_dimensions(state), default=1),
    )


def evolve(
    state: MpsState,
    params: CouplingParams,
    schedule: TrotterSchedule,
    trunc: TruncationParams,
    observer: Observer | None = None,
    start_step: int = 0,
    discarded_offset: float = 0.0,
) -> EvolutionRecord:
    """
    Run a quench from the given state and record observables.

    The state is evolved in place for round(t_max/dt) − start_step steps.
    Observations are taken at every step that is a multiple of
    observe_stride (including start_step when it is one), each passed to
    `observer` as soon as it is recorded.

    Args:
        state: Initial state at step `start_step` (mutated).
        params: Post-quench couplings.
        schedule: Time step, horizon and stride.
        trunc: Truncation controls.
        observer: Optional callback invoked with every Observation.
        start_step: Step the state corresponds to; > 0 resumes from a snapshot.
        discarded_offset: Cumulative discarded weight accumulated before start_step.

    Returns:
        EvolutionRecord of all observations from start_step on.

    Raises:
        EvolutionAbortedError: On norm drift, a corrupt density matrix or a
            failed canonical-form refresh.
        ValueError: If the state length does not match params.n_sites.
    """
    if state.n_sites != params.n_sites:
        raise ValueError(f"State has {state.n_sites} sites, couplings expect {params.n_sites}")
    n_steps = schedule.n_steps
    if not 0 <= start_step <= n_steps:
        raise ValueError(f"start_step {start_step} outside 0..{n_steps}")

    layers = build_gate_layers(params, schedule.dt)
    record = EvolutionRecord()
    cumulative = discarded_offset
    since_last = 0.0

    def _record(step: int) -> None:
        nonlocal since_last
        time = step * schedule.dt
        drift = abs(norm(state) - 1.0)
        # Measurements assume exact canonical form; past the abort limit observe raises
        if CANONICAL_REFRESH_TOLERANCE < drift <= NORM_DRIFT_LIMIT:
            logger.debug("Refreshing canonical form at step %d (norm drift %.3e)", step, drift)
            try:
                refresh_canonical_form(state)
            except CanonicalizationError as exc:
                raise EvolutionAbortedError(
                    f"Canonical form lost at step {step} (t={time:.4f}): {exc}",
                    step=step,
                    time=time,
                ) from exc
        obs = observe(state, params, step, time, since_last, cumulative)
        record.append(obs)
        since_last = 0.0
        if observer is not None:
            observer(obs)

    logger.info(
        "Evolution started: N=%d j_z=%.4g dt=%.4g steps=%d m=%d",
        params.n_sites, params.j_z, schedule.dt, n_steps, trunc.max_bond_dim,
    )
    if start_step % schedule.observe_stride == 0:
        _record(start_step)

    for step in range(start_step + 1, n_steps + 1):
        report = trotter_step(state, layers, trunc)
        cumulative += report.discarded_weight
        since_last += report.discarded_weight
        if step % schedule.observe_stride == 0:
            _record(step)
            logger.debug(
                "t=%.3f chi_max=%d discarded_cum=%.3e",
                step * schedule.dt, report.max_bond_dim, cumulative,
            )

    logger.info(
        "Evolution finished: %d observations, discarded_cum=%.3e", len(record), cumulative
    )
    return record
