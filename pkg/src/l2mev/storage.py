"""Single-file SQLite store for priced findings, with CSV / JSON-lines export."""
from __future__ import annotations

import csv
import hashlib
import json
import sqlite3
from decimal import Decimal
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .pricing.records import PricedMevRecord, utc_day

SCHEMA_VERSION = "1"
EXPORT_COLUMNS = (
    "chain_id", "block", "day_utc", "tx_hash", "kind", "profit_token",
    "profit_raw", "usd_profit", "route", "path_length",
)

_SCHEMA = """
CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL) WITHOUT ROWID;
CREATE TABLE IF NOT EXISTS blocks (
    chain_id INTEGER NOT NULL,
    number INTEGER NOT NULL,
    timestamp INTEGER NOT NULL,
    digest TEXT NOT NULL,
    diagnostics TEXT NOT NULL,
    PRIMARY KEY (chain_id, number)
) WITHOUT ROWID;
CREATE TABLE IF NOT EXISTS findings (
    chain_id INTEGER NOT NULL,
    tx_hash TEXT NOT NULL,
    ordinal INTEGER NOT NULL,
    block INTEGER NOT NULL,
    timestamp INTEGER NOT NULL,
    tx_index INTEGER NOT NULL,
    kind TEXT NOT NULL,
    profit_token TEXT NOT NULL,
    profit_raw TEXT NOT NULL,
    usd_profit TEXT,
    route TEXT NOT NULL,
    path_length INTEGER NOT NULL,
    swaps TEXT NOT NULL,
    PRIMARY KEY (chain_id, tx_hash, ordinal)
) WITHOUT ROWID;
CREATE INDEX IF NOT EXISTS findings_by_block ON findings (chain_id, block, tx_index, ordinal);
"""


class StorageError(RuntimeError):
    pass


class CoverageGap(StorageError):
    def __init__(self, gaps: Sequence[tuple]):
        text = ", ".join(f"{a}-{b}" if a != b else str(a) for a, b in gaps)
        super().__init__(f"uninspected blocks in range: {text}")
        self.gaps = list(gaps)


def _usd_text(value: Optional[Decimal]) -> Optional[str]:
    return None if value is None else format(value, "f")


def _row(chain_id: int, r: PricedMevRecord) -> tuple:
    return (
        chain_id, r.tx_hash, r.ordinal, r.block_number, r.timestamp, r.tx_index, r.kind, r.profit_token,
        str(r.profit_raw), _usd_text(r.usd_profit), r.route, r.path_length,
        json.dumps([list(k) for k in r.swaps], separators=(",", ":")),
    )


def block_digest(timestamp: int, diagnostics: dict, rows: Iterable[tuple]) -> str:
    h = hashlib.sha256()
    h.update(json.dumps([timestamp, diagnostics], sort_keys=True).encode())
    for row in rows:
        h.update(json.dumps(row[1:]).encode())
    return h.hexdigest()


def missing_intervals(covered: Iterable[int], start: int, stop: int) -> list:
    have = set(covered)
    gaps, run = [], None
    for n in range(start, stop + 1):
        if n in have:
            if run is not None:
                gaps.append((run, n - 1))
                run = None
        elif run is None:
            run = n
    if run is not None:
        gaps.append((run, stop))
    return gaps


class MevStore:
    """Per-block atomic, idempotent persistence.

    Re-persisting a block replaces its findings; identical content is a no-op
    and leaves the file untouched.
    """

    def __init__(self, path):
        self.path = Path(path)
        try:
            self._db = sqlite3.connect(str(self.path), isolation_level=None, check_same_thread=False)
            self._db.executescript(_SCHEMA)
            self._db.execute("INSERT OR IGNORE INTO meta VALUES ('schema_version', ?)", (SCHEMA_VERSION,))
        except sqlite3.Error as exc:
            raise StorageError(f"cannot open store {self.path}: {exc}") from exc
        version = self._db.execute("SELECT value FROM meta WHERE key='schema_version'").fetchone()[0]
        if version != SCHEMA_VERSION:
            raise StorageError(f"store schema {version} unsupported (expected {SCHEMA_VERSION})")

    def close(self):
        self._db.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def persist_block_findings(self, chain_id: int, block_number: int, timestamp: int,
                               records: Sequence[PricedMevRecord], diagnostics: Optional[dict] = None) -> bool:
        """Store one block's records. Returns False when the stored copy was already identical."""
        for r in records:
            if r.block_number != block_number:
                raise ValueError(f"record for block {r.block_number} passed with block {block_number}")
        diagnostics = diagnostics or {}
        rows = [_row(chain_id, r) for r in sorted(records, key=lambda r: (r.tx_index, r.ordinal))]
        digest = block_digest(timestamp, diagnostics, rows)
        current = self._db.execute(
            "SELECT digest FROM blocks WHERE chain_id=? AND number=?", (chain_id, block_number)
        ).fetchone()
        if current is not None and current[0] == digest:
            return False
        try:
            self._db.execute("BEGIN IMMEDIATE")
            self._db.execute("DELETE FROM findings WHERE chain_id=? AND block=?", (chain_id, block_number))
            self._db.executemany("INSERT INTO findings VALUES (?,?,?,?,?,?,?,?,?,?,?,?,?)", rows)
            self._db.execute(
                "INSERT OR REPLACE INTO blocks VALUES (?,?,?,?,?)",
                (chain_id, block_number, timestamp, digest, json.dumps(diagnostics, sort_keys=True)),
            )
            self._db.execute("COMMIT")
        except sqlite3.Error as exc:
            if self._db.in_transaction:
                self._db.execute("ROLLBACK")
            raise StorageError(f"failed to persist block {block_number}: {exc}") from exc
        return True

    def coverage(self, chain_id: int, start: int, stop: int) -> dict:
        """``{block_number: timestamp}`` for every persisted block in range."""
        rows = self._db.execute(
            "SELECT number, timestamp FROM blocks WHERE chain_id=? AND number BETWEEN ? AND ? ORDER BY number",
            (chain_id, start, stop),
        )
        return dict(rows.fetchall())

    def diagnostics(self, chain_id: int, start: int, stop: int) -> dict:
        rows = self._db.execute(
            "SELECT number, diagnostics FROM blocks WHERE chain_id=? AND number BETWEEN ? AND ? ORDER BY number",
            (chain_id, start, stop),
        )
        return {n: json.loads(d) for n, d in rows.fetchall()}

    def query_range(self, chain_id: int, start: int, stop: int) -> tuple:
        """Records in ``[start, stop]`` ordered by (block, tx index, ordinal), plus the coverage map."""
        rows = self._db.execute(
            "SELECT block, timestamp, tx_hash, tx_index, ordinal, kind, profit_token, profit_raw, usd_profit,"
            " route, path_length, swaps FROM findings WHERE chain_id=? AND block BETWEEN ? AND ?"
            " ORDER BY block, tx_index, ordinal",
            (chain_id, start, stop),
        ).fetchall()
        records = [
            PricedMevRecord(
                block_number=b, timestamp=ts, tx_hash=h, tx_index=ti, ordinal=o, kind=k, profit_token=tok,
                profit_raw=int(raw), usd_profit=None if usd is None else Decimal(usd), route=route,
                path_length=pl, swaps=tuple(tuple(k) for k in json.loads(sw)),
            )
            for b, ts, h, ti, o, k, tok, raw, usd, route, pl, sw in rows
        ]
        return records, self.coverage(chain_id, start, stop)

    def chains(self) -> list:
        return [r[0] for r in self._db.execute("SELECT DISTINCT chain_id FROM blocks ORDER BY chain_id")]

    def block_range(self, chain_id: int) -> Optional[tuple]:
        lo, hi = self._db.execute(
            "SELECT MIN(number), MAX(number) FROM blocks WHERE chain_id=?", (chain_id,)
        ).fetchone()
        return None if lo is None else (lo, hi)


def persist_block_findings(store: MevStore, chain_id: int, findings, records, diagnostics=None) -> bool:
    return store.persist_block_findings(chain_id, findings.block_number, findings.timestamp, records, diagnostics)


def query_range(store: MevStore, chain_id: int, start: int, stop: int) -> tuple:
    return store.query_range(chain_id, start, stop)


def _export_rows(chain_id: int, records: Iterable[PricedMevRecord]):
    for r in sorted(records, key=lambda r: (r.block_number, r.tx_index, r.ordinal)):
        yield {
            "chain_id": chain_id,
            "block": r.block_number,
            "day_utc": utc_day(r.timestamp),
            "tx_hash": r.tx_hash,
            "kind": r.kind,
            "profit_token": r.profit_token,
            "profit_raw": str(r.profit_raw),
            "usd_profit": _usd_text(r.usd_profit),
            "route": r.route,
            "path_length": r.path_length,
        }


def export(records: Iterable[PricedMevRecord], path, fmt: str = "csv", chain_id: int = 0) -> Path:
    """Write records sorted by (block, tx index, ordinal) as ``csv`` or ``jsonl``."""
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            if fmt == "csv":
                writer = csv.DictWriter(fh, fieldnames=EXPORT_COLUMNS, lineterminator="\n")
                writer.writeheader()
                for row in _export_rows(chain_id, records):
                    writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
            elif fmt == "jsonl":
                for row in _export_rows(chain_id, records):
                    fh.write(json.dumps(row, separators=(",", ":")) + "\n")
            else:
                raise ValueError(f"unknown export format {fmt!r}")
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc}") from exc
    return path
