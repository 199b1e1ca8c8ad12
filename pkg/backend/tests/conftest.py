from pathlib import Path

import pytest

from entrosteer.config import get_settings

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def ledger(tmp_path, monkeypatch):
    """Point the run ledger at a throwaway database."""
    db_path = tmp_path / "runs.db"
    monkeypatch.setenv("ENTROSTEER_DB_PATH", str(db_path))
    get_settings.cache_clear()
    yield db_path
    get_settings.cache_clear()
