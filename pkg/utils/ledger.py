"""
Run Ledger (SQLite)
Optional record of successful CLI runs: command, canonical config and a digest of the emitted bytes
"""
import hashlib
import json
import logging
import sqlite3
from datetime import datetime, timezone
from typing import Dict, List, Mapping, Optional

logger = logging.getLogger(__name__)


class RunLedger:
    def __init__(self, db_path: str):
        """Initialize SQLite database connection"""
        self.db_path = db_path
        self.init_database()

    def init_database(self):
        """Create the runs table if it doesn't exist"""
        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()

        cursor.execute("""
            CREATE TABLE IF NOT EXISTS runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                command TEXT NOT NULL,
                config TEXT NOT NULL,
                output_sha256 TEXT NOT NULL,
                recorded_at TEXT NOT NULL
            )
        """)

        conn.commit()
        conn.close()

    def record_run(self, command: str, config: Mapping[str, object], output: bytes,
                   recorded_at: Optional[datetime] = None) -> int:
        """Append one run and return its ID"""
        config_json = json.dumps(dict(config), sort_keys=True, separators=(",", ":"))
        digest = hashlib.sha256(output).hexdigest()
        stamp = (recorded_at or datetime.now(timezone.utc)).isoformat(timespec="seconds")

        conn = sqlite3.connect(self.db_path)
        cursor = conn.cursor()
        cursor.execute("""
            INSERT INTO runs (command, config, output_sha256, recorded_at)
            VALUES (?, ?, ?, ?)
        """, (command, config_json, digest, stamp))

        run_id = cursor.lastrowid
        conn.commit()
        conn.close()
        logger.debug("Recorded run %d (%s) in %s", run_id, command, self.db_path)
        return run_id

    def get_runs(self, command: Optional[str] = None, limit: int = 20) -> List[Dict]:
        """Most recent runs first, optionally filtered by command"""
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        cursor = conn.cursor()

        if command:
            cursor.execute("""
                SELECT * FROM runs WHERE command = ? ORDER BY id DESC LIMIT ?
            """, (command, limit))
        else:
            cursor.execute("SELECT * FROM runs ORDER BY id DESC LIMIT ?", (limit,))

        rows = cursor.fetchall()
        conn.close()

        return [{
            "id": row["id"],
            "command": row["command"],
            "config": json.loads(row["config"]),
            "output_sha256": row["output_sha256"],
            "recorded_at": row["recorded_at"],
        } for row in rows]
