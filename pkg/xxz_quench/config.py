"""XXZ Quench — Process configuration via environment variables."""

from __future__ import annotations

from pathlib import Path

from pydantic_settings import BaseSettings


class XxzSettings(BaseSettings):
    """Central configuration loaded from environment / .env file."""

    model_config = {"env_file": ".env", "env_file_encoding": "utf-8", "extra": "ignore"}

    # ── Runs ───────────────────────────────────────────────────
    output_root: Path = Path("runs")
    sweep_max_workers: int = 1

    # ── Oracle ─────────────────────────────────────────────────
    oracle_tolerance: float = 5e-3

    # ── Logging ────────────────────────────────────────────────
    log_level: str = "INFO"
    log_format: str = "console"


settings = XxzSettings()
