"""
Quench Runner — Build the initial state, evolve, and write the run's files.

Every run directory receives:
- concurrence.csv    `time,bond,concurrence` (bond i is the pair (i, i+1), 1-based)
- magnetization.csv  `time,site,sz` (1-based sites)
- runlog.csv         `step,time,discarded_weight_step,discarded_weight_cum,energy,norm`
- manifest.json      RunManifest, written on success and on failure
- final_state.mps    only when `save_final_state` is set

Each CSV starts with `#` comment lines echoing the configuration. Output is
byte-identical for identical configurations on the same build.

Sweeps run one independent quench per j_z value, each in its own
subdirectory, optionally in a process pool; `index.csv` maps j_z to
directories and statuses, and a failed run never stops the others.
"""

from __future__ import annotations

import csv
import logging
import time
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Any

from xxz_quench import __version__
from xxz_quench.dynamics.tebd import EvolutionRecord, Observation, evolve
from xxz_quench.experiments.schema import QuenchConfig, RunManifest, RunStatus
from xxz_quench.mps.snapshot import save_snapshot
from xxz_quench.mps.state import product_state

logger = logging.getLogger(__name__)

CONCURRENCE_FILE = "concurrence.csv"
MAGNETIZATION_FILE = "magnetization.csv"
RUNLOG_FILE = "runlog.csv"
MANIFEST_FILE = "manifest.json"
SNAPSHOT_FILE = "final_state.mps"
INDEX_FILE = "index.csv"


class QuenchRunError(Exception):
    """Raised when a run fails; the failed manifest has already been written."""

    def __init__(self, message: str, output_dir: str = "") -> None:
        super().__init__(message)
        self.output_dir = output_dir

    def __reduce__(self) -> tuple[type, tuple[str, str]]:
        return (type(self), (str(self), self.output_dir))


@dataclass
class RunResult:
    config: QuenchConfig
    output_dir: Path
    record: EvolutionRecord
    manifest: RunManifest


@dataclass(frozen=True)
class SweepEntry:
    j_z: float
    directory: Path
    status: RunStatus
    error: str | None = None


# ════════════════════════════════════════════════════════════════
# CSV writing
# ════════════════════════════════════════════════════════════════


def format_number(value: float) -> str:
    """Shortest text that keeps 15 significant digits, `.` decimal separator."""
    return format(float(value), ".15g")


def _write_echo(handle: IO[str], config: QuenchConfig) -> None:
    handle.write(f"# xxz-quench {__version__}\n")
    for key, value in config.echo():
        handle.write(f"# {key} = {value}\n")


class RunWriter:
    """
    Streams observations into the three long-format CSV files of a run.

    Used as the `observer` of `evolve`: every observation is appended and
    flushed as soon as it is recorded, so an aborted run keeps its rows up
    to the failure.
    """

    _HEADERS = {
        CONCURRENCE_FILE: ("time", "bond", "concurrence"),
        MAGNETIZATION_FILE: ("time", "site", "sz"),
        RUNLOG_FILE: (
            "step", "time", "discarded_weight_step", "discarded_weight_cum", "energy", "norm"
        ),
    }

    def __init__(self, config: QuenchConfig, output_dir: Path) -> None:
        self._handles: dict[str, IO[str]] = {}
        self._writers: dict[str, Any] = {}
        for name, header in self._HEADERS.items():
            handle = (output_dir / name).open("w", encoding="utf-8", newline="")
            self._handles[name] = handle
            _write_echo(handle, config)
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            self._writers[name] = writer

    def __call__(self, obs: Observation) -> None:
        t = format_number(obs.time)
        self._writers[CONCURRENCE_FILE].writerows(
            (t, str(bond + 1), format_number(value)) for bond, value in enumerate(obs.concurrence)
        )
        self._writers[MAGNETIZATION_FILE].writerows(
            (t, str(site + 1), format_number(value))
            for site, value in enumerate(obs.magnetization)
        )
        self._writers[RUNLOG_FILE].writerow(
            (
                str(obs.step),
                t,
                format_number(obs.discarded_weight_step),
                format_number(obs.discarded_weight_cum),
                format_number(obs.energy),
                format_number(obs.norm),
            )
        )
        for handle in self._handles.values():
            handle.flush()

    def close(self) -> None:
        for handle in self._handles.values():
            handle.close()

    def __enter__(self) -> RunWriter:
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()


def write_manifest(manifest: RunManifest, output_dir: Path) -> Path:
    path = output_dir / MANIFEST_FILE
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


# ════════════════════════════════════════════════════════════════
# Runs
# ════════════════════════════════════════════════════════════════


def run_quench(config: QuenchConfig, output_dir: str | Path | None = None) -> RunResult:
    """
    Run one quench and write its files.

    Builds the Néel state (anisotropy_quench) or the domain-wall state
    (domain_wall), evolves it under H(j_z) from t=0 and streams every observation to disk.

    Args:
        config: Validated configuration.
        output_dir: Overrides config.output_dir.

    Returns:
        RunResult with the in-memory record and the manifest.

    Raises:
        QuenchRunError: If the run stops for any reason; a failed manifest is
            written first and the rows observed up to the failure stay on disk.
    """
    if output_dir is not None:
        config = config.model_copy(update={"output_dir": Path(output_dir)})
    target = config.output_dir
    target.mkdir(parents=True, exist_ok=True)
    config_echo = config.model_dump(mode="json")
    started = time.perf_counter()

    logger.info(
        "Quench run: protocol=%s N=%d j_z=%.4g -> %s",
        config.protocol.value, config.n_sites, config.j_z, target,
    )
    try:
        state = product_state(config.protocol.initial_pattern(config.n_sites))
        with RunWriter(config, target) as writer:
            record = evolve(
                state, config.couplings, config.schedule, config.truncation, observer=writer
            )
        if config.save_final_state:
            save_snapshot(state, target / SNAPSHOT_FILE)
    except Exception as exc:
        # Every run leaves a manifest, whatever stopped it
        manifest = RunManifest(
            config=config_echo,
            code_version=__version__,
            wall_clock_seconds=time.perf_counter() - started,
            status=RunStatus.FAILED,
            error=f"{type(exc).__name__}: {exc}",
        )
        write_manifest(manifest, target)
        logger.error("Quench run failed in %s: %s", target, exc)
        raise QuenchRunError(str(exc), output_dir=str(target)) from exc

    manifest = RunManifest(
        config=config_echo,
        code_version=__version__,
        wall_clock_seconds=time.perf_counter() - started,
        final_cumulative_discarded_weight=(
            record.cumulative_discarded_weight[-1] if len(record) else 0.0
        ),
        observations=len(record),
        status=RunStatus.SUCCESS,
    )
    write_manifest(manifest, target)
    return RunResult(config=config, output_dir=target, record=record, manifest=manifest)


def sweep_directories(j_z_values: Sequence[float]) -> list[str]:
    """
    Subdirectory name per j_z value; duplicates get `__2`, `__3`, … suffixes.
    """
    names: list[str] = []
    seen: dict[str, int] = {}
    for j_z in j_z_values:
        base = f"jz_{format_number(j_z)}"
        seen[base] = seen.get(base, 0) + 1
        names.append(base if seen[base] == 1 else f"{base}__{seen[base]}")
    return names


def _sweep_worker(config: QuenchConfig, directory: Path) -> SweepEntry:
    try:
        run_quench(config, directory)
    except QuenchRunError as exc:
        return SweepEntry(j_z=config.j_z, directory=directory, status=RunStatus.FAILED,
                          error=str(exc))
    return SweepEntry(j_z=config.j_z, directory=directory, status=RunStatus.SUCCESS)


def sweep(
    base: QuenchConfig,
    j_z_values: Sequence[float],
    max_workers: int = 1,
    output_dir: str | Path | None = None,
) -> list[SweepEntry]:
    """
    One independent quench per j_z value.

    Args:
        base: Configuration every run starts from.
        j_z_values: Anisotropies to run, in order; duplicates allowed.
        max_workers: Process pool width; 1 runs sequentially in-process.
        output_dir: Sweep root; defaults to base.output_dir.

    Returns:
        One SweepEntry per value, in input order.

    Raises:
        ValueError: If j_z_values is empty.
    """
    if not j_z_values:
        raise ValueError("A sweep needs at least one j_z value")
    root = Path(output_dir) if output_dir is not None else base.output_dir
    root.mkdir(parents=True, exist_ok=True)
    jobs = [
        (base.model_copy(update={"j_z": float(j_z), "output_dir": root / name}), root / name)
        for j_z, name in zip(j_z_values, sweep_directories(j_z_values), strict=True)
    ]

    if max_workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(max_workers, len(jobs))) as pool:
            futures = [pool.submit(_sweep_worker, config, directory) for config, directory in jobs]
            entries = [future.result() for future in futures]
    else:
        entries = [_sweep_worker(config, directory) for config, directory in jobs]

    write_sweep_index(entries, root)
    failed = sum(entry.status is RunStatus.FAILED for entry in entries)
    logger.info("Sweep finished: %d runs, %d failed", len(entries), failed)
    return entries


def write_sweep_index(entries: Sequence[SweepEntry], root: Path) -> Path:
    path = root / INDEX_FILE
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(("j_z", "directory", "status", "error"))
        for entry in entries:
            writer.writerow(
                (
                    format_number(entry.j_z),
                    entry.directory.name,
                    entry.status.value,
                    entry.error or "",
                )
            )
    return path
