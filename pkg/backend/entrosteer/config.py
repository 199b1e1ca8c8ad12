"""Application settings: seeds, tolerances and solver budgets."""

from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache
from pathlib import Path

# Resolve .env relative to this file's location (backend/entrosteer/ → project root)
_PROJECT_ROOT = Path(__file__).parent.parent.parent
_ENV_FILE = _PROJECT_ROOT / ".env"


class Settings(BaseSettings):
    # Randomness
    seed: int = 0                             # ENTROSTEER_SEED overrides
    threads: int = 1

    # Numerics
    resolution: float = 1e-4                  # bisection resolution on noise parameters
    violation_tol: float = 1e-9               # lhs < bound - tol counts as violated

    # Pure-state minimiser (bound certification)
    minimizer_restarts: int = 64
    minimizer_maxiter: int = 4000

    # Local-unitary measurement optimiser
    optimizer_restarts: int = 32
    optimizer_maxiter: int = 500

    # Random-state survey
    survey_batch_size: int = 10_000

    # Run ledger
    db_path: str = str(_PROJECT_ROOT / "data" / "entrosteer.db")
    record_runs: bool = False

    model_config = SettingsConfigDict(
        env_prefix="ENTROSTEER_",
        env_file=str(_ENV_FILE),
        env_file_encoding="utf-8",
        env_ignore_empty=True,       # system env vars set to "" don't override .env
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    return Settings()
