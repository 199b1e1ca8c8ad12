"""SQLite run ledger: connection, schema initialization, record and list runs."""

import json
import sqlite3
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

from entrosteer.config import get_settings

SCHEMA_SQL = """
CREATE TABLE IF NOT EXISTS runs (
    id           INTEGER PRIMARY KEY AUTOINCREMENT,
    subcommand   TEXT NOT NULL,
    config_json  TEXT NOT NULL,
    artifact     TEXT NOT NULL,
    format       TEXT NOT NULL,
    seed         INTEGER NOT NULL,
    exit_code    INTEGER NOT NULL DEFAULT 0,
    created_at   TEXT NOT NULL DEFAULT (datetime('now'))
);

CREATE INDEX IF NOT EXISTS idx_runs_subcommand ON runs(subcommand, created_at DESC);
"""


def get_db_connection(db_path: Optional[str] = None) -> sqlite3.Connection:
    """Open a new SQLite connection. Caller is responsible for closing."""
    path = db_path or get_settings().db_path
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    conn = sqlite3.connect(path)
    conn.row_factory = sqlite3.Row
    conn.execute("PRAGMA journal_mode = WAL")
    return conn


@contextmanager
def get_db(db_path: Optional[str] = None):
    """Context manager for command handlers."""
    conn = get_db_connection(db_path)
    try:
        yield conn
        conn.commit()
    except Exception:
        conn.rollback()
        raise
    finally:
        conn.close()


def init_db(db_path: Optional[str] = None):
    """Create all tables. Safe to call multiple times (CREATE IF NOT EXISTS)."""
    conn = get_db_connection(db_path)
    conn.executescript(SCHEMA_SQL)
    conn.commit()
    conn.close()


def record_run(subcommand: str, config: dict, artifact: str, fmt: str, seed: int,
               exit_code: int = 0, db_path: Optional[str] = None) -> int:
    init_db(db_path)
    with get_db(db_path) as db:
        cursor = db.execute("""
            INSERT INTO runs (subcommand, config_json, artifact, format, seed, exit_code)
            VALUES (?, ?, ?, ?, ?, ?)
        """, (subcommand, json.dumps(config, sort_keys=True), artifact, fmt, seed, exit_code))
        return cursor.lastrowid


def list_runs(subcommand: Optional[str] = None, limit: int = 20, db_path: Optional[str] = None) -> list[dict]:
    """Most recent runs first; the artifact itself is left out."""
    init_db(db_path)
    with get_db(db_path) as db:
        if subcommand:
            rows = db.execute("""
                SELECT id, subcommand, config_json, format, seed, exit_code, created_at
                FROM runs WHERE subcommand = ?
                ORDER BY id DESC LIMIT ?
            """, (subcommand, limit)).fetchall()
        else:
            rows = db.execute("""
                SELECT id, subcommand, config_json, format, seed, exit_code, created_at
                FROM runs ORDER BY id DESC LIMIT ?
            """, (limit,)).fetchall()
    return [dict(r) for r in rows]


def get_run_artifact(run_id: int, db_path: Optional[str] = None) -> Optional[str]:
    init_db(db_path)
    with get_db(db_path) as db:
        row = db.execute("SELECT artifact FROM runs WHERE id = ?", (run_id,)).fetchone()
    return row["artifact"] if row else None
