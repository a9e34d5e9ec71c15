"""Block, transaction and log records as delivered by ingestion."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

SUCCESS = "success"
REVERTED = "reverted"


@dataclass(frozen=True)
class LogRecord:
    address: str
    topics: Tuple[str, ...]
    data: bytes
    log_index: int

    def __post_init__(self):
        if len(self.topics) > 4:
            raise ValueError(f"log {self.log_index}: at most 4 topics, got {len(self.topics)}")
        if self.log_index < 0:
            raise ValueError("log_index must be non-negative")


@dataclass(frozen=True)
class TransactionRecord:
    hash: str
    index: int
    sender: str
    recipient: Optional[str]
    gas_used: int
    status: str
    logs: Tuple[LogRecord, ...] = ()

    def __post_init__(self):
        if self.status not in (SUCCESS, REVERTED):
            raise ValueError(f"unknown transaction status {self.status!r}")
        if self.status == REVERTED and self.logs:
            raise ValueError(f"reverted transaction {self.hash} carries logs")
        prev = -1
        for log in self.logs:
            if log.log_index <= prev:
                raise ValueError(f"transaction {self.hash}: log indices not strictly increasing")
            prev = log.log_index

    @property
    def reverted(self) -> bool:
        return self.status == REVERTED


@dataclass(frozen=True)
class BlockData:
    number: int
    timestamp: int
    transactions: Tuple[TransactionRecord, ...] = field(default=())

    def __post_init__(self):
        if self.number < 0:
            raise ValueError("block number must be non-negative")
        prev = -1
        for tx in self.transactions:
            if tx.index <= prev:
                raise ValueError(f"block {self.number}: transaction indices not strictly increasing")
            prev = tx.index

    @property
    def log_count(self) -> int:
        return sum(len(tx.logs) for tx in self.transactions)
