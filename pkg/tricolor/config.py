"""
Runtime settings read from the environment (and an optional .env file).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

from tricolor.errors import ConfigError

# Load environment variables from .env file
load_dotenv()


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


def _env_flag(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).lower() not in ("0", "false", "no", "")


@dataclass(frozen=True)
class Settings:
    jobs: Optional[int]
    log_level: str
    results_dir: str
    budget: int
    runs: int
    run_slow: bool


def load_settings() -> Settings:
    """Build Settings from TRICOLOR_* environment variables."""
    jobs = _env_int("TRICOLOR_JOBS", None)
    if jobs is not None and jobs < 1:
        raise ConfigError(f"TRICOLOR_JOBS must be positive, got {jobs}")
    return Settings(
        jobs=jobs,
        log_level=os.getenv("TRICOLOR_LOG_LEVEL", "INFO").upper(),
        results_dir=os.getenv("TRICOLOR_RESULTS_DIR", "results"),
        budget=_env_int("TRICOLOR_BUDGET", 300_000),
        runs=_env_int("TRICOLOR_RUNS", 25),
        run_slow=_env_flag("TRICOLOR_RUN_SLOW"),
    )
