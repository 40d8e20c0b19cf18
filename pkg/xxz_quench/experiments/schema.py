"""
Experiment Schema — Pydantic models for quench configurations and run manifests.

A quench configuration is a flat `key = value` document; every key maps to a
field of QuenchConfig. Missing keys take the defaults of the reference
simulation (N=60, δt=0.025, t ≤ 40, m=60, δρ=1e-8); unknown keys are rejected.
"""

from __future__ import annotations

import enum
from pathlib import Path
from typing import Any

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from xxz_quench.config import settings
from xxz_quench.dynamics.tebd import DEFAULT_OBSERVE_STRIDE, TrotterSchedule
from xxz_quench.errors import ConfigError
from xxz_quench.model.spin_model import CouplingParams
from xxz_quench.mps.state import Spin, TruncationParams, domain_wall_pattern, neel_pattern

# ════════════════════════════════════════════════════════════════
# Enumerations
# ════════════════════════════════════════════════════════════════


class QuenchProtocol(str, enum.Enum):
    """Which initial product state is released under H(j_z)."""

    ANISOTROPY_QUENCH = "anisotropy_quench"  # Néel state, J_z → ∞ to finite J_z
    DOMAIN_WALL = "domain_wall"  # ↑…↑↓…↓ released

    def initial_pattern(self, n_sites: int) -> list[Spin]:
        if self is QuenchProtocol.ANISOTROPY_QUENCH:
            return neel_pattern(n_sites)
        return domain_wall_pattern(n_sites)


class RunStatus(str, enum.Enum):
    SUCCESS = "success"
    FAILED = "failed"


# ════════════════════════════════════════════════════════════════
# Configuration
# ════════════════════════════════════════════════════════════════


class QuenchConfig(BaseModel):
    """One quench run. Deterministic: there is no seed because nothing is random."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    protocol: QuenchProtocol = QuenchProtocol.ANISOTROPY_QUENCH
    n_sites: int = Field(default=60, ge=2, le=10_000)
    j_z: float = 1.0
    j_xy: float = 1.0
    dt: float = 0.025
    t_max: float = Field(default=40.0, ge=0.0)
    max_bond_dim: int = Field(default=60, ge=1)
    discarded_weight_target: float = Field(default=1e-8, ge=0.0, le=1.0)
    observe_stride: int = Field(default=DEFAULT_OBSERVE_STRIDE, ge=1)
    output_dir: Path = Field(default_factory=lambda: settings.output_root)
    save_final_state: bool = False

    @field_validator("dt")
    @classmethod
    def _dt_positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("dt must be positive")
        return value

    @model_validator(mode="after")
    def _consistent(self) -> QuenchConfig:
        if self.n_sites % 2:
            raise ValueError("n_sites must be even for both quench protocols")
        if 0.0 < self.t_max < self.dt:
            raise ValueError("t_max must be 0 or at least one time step dt")
        return self

    # ── Derived parameter objects ─────────────────────────────

    @property
    def couplings(self) -> CouplingParams:
        return CouplingParams(j_xy=self.j_xy, j_z=self.j_z, n_sites=self.n_sites)

    @property
    def schedule(self) -> TrotterSchedule:
        return TrotterSchedule(dt=self.dt, t_max=self.t_max, observe_stride=self.observe_stride)

    @property
    def truncation(self) -> TruncationParams:
        return TruncationParams(
            max_bond_dim=self.max_bond_dim,
            discarded_weight_target=self.discarded_weight_target,
        )

    def echo(self) -> list[tuple[str, str]]:
        """(key, value) pairs in declaration order, for CSV headers and manifests."""
        data = self.model_dump(mode="json")
        return [(key, str(data[key])) for key in type(self).model_fields]


class RunManifest(BaseModel):
    """Summary written next to every run's CSV files, on success and on failure."""

    config: dict[str, Any]
    code_version: str
    wall_clock_seconds: float
    final_cumulative_discarded_weight: float | None = None
    observations: int = 0
    status: RunStatus
    error: str | None = None


# ════════════════════════════════════════════════════════════════
# Parsing
# ════════════════════════════════════════════════════════════════


def _split_lines(source: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for number, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {number}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {number}: missing key")
        if key in values:
            raise ConfigError(f"{key}: duplicated on line {number}")
        values[key] = value
    return values


def parse_config(source: str, **overrides: Any) -> QuenchConfig:
    """
    Parse a flat key=value document into a validated QuenchConfig.

    Args:
        source: Document text; `#` starts a comment, blank lines are ignored.
        **overrides: Field values applied on top of the document (CLI flags).

    Returns:
        The QuenchConfig.

    Raises:
        ConfigError: Naming the offending key for unknown keys, duplicates
            or out-of-range values.
    """
    values: dict[str, Any] = dict(_split_lines(source))
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return QuenchConfig.model_validate(values)
    except ValidationError as exc:
        problems = []
        for error in exc.errors():
            key = ".".join(str(part) for part in error["loc"]) or "config"
            if error["type"] == "extra_forbidden":
                problems.append(f"{key}: unknown key")
            else:
                problems.append(f"{key}: {error['msg']}")
        raise ConfigError("; ".join(problems)) from exc


def load_config(path: str | Path, **overrides: Any) -> QuenchConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), **overrides)


def render_config(config: QuenchConfig) -> str:
    """Inverse of parse_config: a document that parses back to the same config."""
    return "".join(f"{key} = {value}\n" for key, value in config.echo())
