"""
XXZ Quench — Command-line entry point.

Subcommands:
    run <config-file>                      one quench, CSV + manifest output
    sweep <config-file> --jz 0,0.5,1       one quench per anisotropy
    oracle-check --n 10                    TEBD vs exact diagonalization
    analyze <run-dir> --bonds 25,30        first peaks / onsets of a finished run

Usage:
    xxz-quench run configs/anisotropy_quench.conf
    python -m xxz_quench sweep configs/anisotropy_quench.conf --jz 0,0.5,1,1.5,2 --workers 5

Exit code 0 on success, 1 on any failed run or a failed oracle check,
2 on a bad configuration.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence

import structlog
from rich.console import Console
from rich.table import Table

from xxz_quench.config import settings
from xxz_quench.errors import ConfigError, SystemSizeError
from xxz_quench.experiments.analysis import summarize_run
from xxz_quench.experiments.runner import QuenchRunError, run_quench, sweep
from xxz_quench.experiments.schema import QuenchConfig, QuenchProtocol, RunStatus, load_config
from xxz_quench.model.spin_model import CouplingParams
from xxz_quench.oracle.exact import compare_with_ed

console = Console()


def configure_logging() -> None:
    """Configure structured logging."""
    logging.basicConfig(
        level=logging.getLevelName(settings.log_level),
        format="%(levelname)s %(name)s: %(message)s",
    )
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.dev.set_exc_info,
            structlog.processors.TimeStamper(fmt="iso"),
            (
                structlog.dev.ConsoleRenderer()
                if settings.log_format != "json"
                else structlog.processors.JSONRenderer()
            ),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(
            logging.getLevelName(settings.log_level)
        ),
        context_class=dict,
        logger_factory=structlog.PrintLoggerFactory(),
        cache_logger_on_first_use=True,
    )


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from exc


# ════════════════════════════════════════════════════════════════
# Subcommands
# ════════════════════════════════════════════════════════════════


def cmd_run(args: argparse.Namespace) -> int:
    log = structlog.get_logger()
    config = load_config(args.config, output_dir=args.output_dir)
    log.info("xxz_quench.cli.run_started", protocol=config.protocol.value, j_z=config.j_z,
             n_sites=config.n_sites, output_dir=str(config.output_dir))
    try:
        result = run_quench(config)
    except QuenchRunError as exc:
        log.error("xxz_quench.cli.run_failed", error=str(exc), output_dir=exc.output_dir)
        return 1
    log.info(
        "xxz_quench.cli.run_finished",
        observations=result.manifest.observations,
        seconds=round(result.manifest.wall_clock_seconds, 3),
        discarded_weight=result.manifest.final_cumulative_discarded_weight,
    )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    log = structlog.get_logger()
    base = load_config(args.config, output_dir=args.output_dir)
    workers = args.workers if args.workers is not None else settings.sweep_max_workers
    entries = sweep(base, args.jz, max_workers=workers)

    table = Table(title="Sweep")
    table.add_column("j_z", style="cyan")
    table.add_column("Directory", style="green")
    table.add_column("Status")
    for entry in entries:
        log.info("xxz_quench.cli.sweep_entry", j_z=entry.j_z, directory=str(entry.directory),
                 status=entry.status.value, error=entry.error)
        status = (
            "[bold green]✓ success[/bold green]"
            if entry.status is RunStatus.SUCCESS
            else f"[bold red]✗ failed[/bold red] {entry.error}"
        )
        table.add_row(f"{entry.j_z:g}", str(entry.directory), status)
    console.print(table)
    return 0 if all(e.status is RunStatus.SUCCESS for e in entries) else 1


def cmd_oracle_check(args: argparse.Namespace) -> int:
    log = structlog.get_logger()
    tolerance = args.tolerance if args.tolerance is not None else settings.oracle_tolerance

    table = Table(title=f"TEBD vs exact diagonalization (N={args.n}, dt={args.dt:g})")
    table.add_column("Protocol", style="cyan")
    table.add_column("j_z", style="cyan")
    table.add_column("max |ΔC|", justify="right")
    table.add_column("max |Δσᶻ|", justify="right")
    table.add_column("max |ΔE|", justify="right")

    worst = 0.0
    for protocol in QuenchProtocol:
        for j_z in args.jz:
            params = CouplingParams(j_z=j_z, n_sites=args.n)
            comparison = compare_with_ed(
                protocol.initial_pattern(args.n),
                params,
                dt=args.dt,
                t_max=args.t_max,
                observe_stride=args.stride,
                max_bond_dim=args.max_bond_dim,
            )
            worst = max(worst, comparison.max_concurrence_deviation)
            table.add_row(
                protocol.value,
                f"{j_z:g}",
                f"{comparison.max_concurrence_deviation:.3e}",
                f"{comparison.max_magnetization_deviation:.3e}",
                f"{comparison.max_energy_deviation:.3e}",
            )
    console.print(table)
    console.print(f"max deviation: {worst:.6e}")

    passed = worst <= tolerance
    log.info("xxz_quench.cli.oracle_check", n_sites=args.n, max_deviation=worst,
             tolerance=tolerance, passed=passed)
    if passed:
        console.print(f"[bold green]✓ within tolerance {tolerance:g}[/bold green]")
    else:
        console.print(f"[bold red]✗ exceeds tolerance {tolerance:g}[/bold red]")
    return 0 if passed else 1


def cmd_analyze(args: argparse.Namespace) -> int:
    summaries = summarize_run(args.run_dir, bonds=args.bonds, late_after=args.late_after)
    table = Table(title=f"Concurrence digest: {args.run_dir}")
    table.add_column("Pair", style="cyan", no_wrap=True)
    table.add_column("Peak t", justify="right")
    table.add_column("Peak C", justify="right")
    table.add_column("Onset t", justify="right")
    table.add_column("Late mean", justify="right")
    table.add_column("Max", justify="right")
    table.add_column("Freq", justify="right")
    for s in summaries:
        table.add_row(
            f"C_{{{s.bond},{s.bond + 1}}}",
            f"{s.peak.time:.3f}" if s.peak else "—",
            f"{s.peak.value:.4f}" if s.peak else "—",
            f"{s.onset:.3f}" if s.onset is not None else "—",
            f"{s.late_mean:.4f}",
            f"{s.maximum:.4f}",
            f"{s.frequency:.3f}" if s.frequency is not None else "—",
        )
    console.print(table)
    return 0


# ════════════════════════════════════════════════════════════════
# Parser
# ════════════════════════════════════════════════════════════════


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xxz-quench",
        description="Nearest-neighbour concurrence dynamics after quenches of the open XXZ chain",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run one quench from a key=value config file")
    run.add_argument("config", help="Config file (key = value lines)")
    run.add_argument("--output-dir", default=None, help="Override output_dir")
    run.set_defaults(handler=cmd_run)

    sw = sub.add_parser("sweep", help="Run one quench per j_z value")
    sw.add_argument("config", help="Base config file")
    sw.add_argument("--jz", type=_float_list, required=True, help="Comma list, e.g. 0,0.5,1")
    sw.add_argument("--workers", type=int, default=None, help="Parallel runs")
    sw.add_argument("--output-dir", default=None, help="Sweep root directory")
    sw.set_defaults(handler=cmd_sweep)

    oracle = sub.add_parser("oracle-check", help="Compare TEBD with exact diagonalization")
    oracle.add_argument("--n", type=int, required=True, help="Number of sites (≤ 12)")
    oracle.add_argument("--jz", type=_float_list, default=[0.0, 1.0],
                        help="Comma list; j_z=2 needs --dt 0.0125 to meet the default tolerance")
    oracle.add_argument("--dt", type=float, default=QuenchConfig.model_fields["dt"].default)
    oracle.add_argument("--t-max", type=float, default=10.0)
    oracle.add_argument("--stride", type=int, default=4)
    oracle.add_argument("--max-bond-dim", type=int, default=60)
    oracle.add_argument("--tolerance", type=float, default=None)
    oracle.set_defaults(handler=cmd_oracle_check)

    analyze = sub.add_parser("analyze", help="Digest concurrence.csv of a finished run")
    analyze.add_argument("run_dir", help="Run directory")
    analyze.add_argument("--bonds", type=_int_list, default=None,
                         help="1-based pair labels i of C_{i,i+1}, e.g. 25,30")
    analyze.add_argument("--late-after", type=float, default=None)
    analyze.set_defaults(handler=cmd_analyze)
    return parser


def main(argv: Sequence[str] | None = None) -> None:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        code = args.handler(args)
    except ConfigError as exc:
        console.print(f"[bold red]Configuration error:[/bold red] {exc}")
        code = 2
    except FileNotFoundError as exc:
        console.print(f"[bold red]File not found:[/bold red] {exc.filename}")
        code = 2
    except SystemSizeError as exc:
        console.print(f"[bold red]Chain too long:[/bold red] {exc}")
        code = 2
    sys.exit(code)


if __name__ == "__main__":
    main()
