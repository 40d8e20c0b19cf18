"""Experiments — quench configurations, runs, sweeps and result analysis."""

from xxz_quench.experiments.runner import (
    QuenchRunError,
    RunResult,
    SweepEntry,
    run_quench,
    sweep,
)
from xxz_quench.experiments.schema import (
    QuenchConfig,
    QuenchProtocol,
    RunManifest,
    RunStatus,
    load_config,
    parse_config,
    render_config,
)

__all__ = [
    "QuenchConfig",
    "QuenchProtocol",
    "QuenchRunError",
    "RunManifest",
    "RunResult",
    "RunStatus",
    "SweepEntry",
    "load_config",
    "parse_config",
    "render_config",
    "run_quench",
    "sweep",
]
