"""End-to-end inspection: blocks -> classify -> detect -> price -> store."""
from __future__ import annotations

import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .concurrency import ordered_map
from .decoder.classify import classify_block
from .decoder.registry import build_registry
from .detector.inspect import inspect_block
from .ingestion.config import ChainConfig
from .ingestion.metadata import PoolMetadataResolver, TokenDecimals
from .pricing.quotes import PriceOracle
from .pricing.records import price_findings

logger = logging.getLogger(__name__)


class InspectionError(RuntimeError):
    def __init__(self, block_number: int, cause: BaseException):
        super().__init__(f"inspection failed at block {block_number}: {cause}")
        self.block_number = block_number
        self.cause = cause


@dataclass
class InspectionSummary:
    blocks: int = 0
    findings: Counter = field(default_factory=Counter)
    unpriced: int = 0
    written: int = 0
    elapsed: float = 0.0
    first_block: Optional[int] = None
    last_block: Optional[int] = None

    @property
    def blocks_per_second(self) -> float:
        return self.blocks / self.elapsed if self.elapsed > 0 else float("inf")

    def as_dict(self) -> dict:
        return {
            "blocks": self.blocks,
            "from": self.first_block,
            "to": self.last_block,
            "findings": {k: self.findings.get(k, 0) for k in ("arbitrage", "sandwich", "liquidation")},
            "unpriced": self.unpriced,
            "blocks_written": self.written,
            "elapsed_s": round(self.elapsed, 3),
            "blocks_per_s": round(self.blocks_per_second, 2) if self.elapsed > 0 else None,
        }


class BlockInspector:
    """Holds the per-chain state (registry, metadata and price caches) for one run."""

    def __init__(self, cfg: ChainConfig, state, *, native_hop: Optional[bool] = None, registry=None,
                 max_cycle_length: int = 8):
        self.cfg = cfg
        self.registry = registry or build_registry(cfg.registry_extensions)
        decimals = TokenDecimals(state)
        self.metadata = PoolMetadataResolver(state, decimals)
        self.oracle = PriceOracle(cfg, state, native_hop=native_hop, decimals=decimals)
        self.max_cycle_length = max_cycle_length

    def __call__(self, block):
        classified = classify_block(block, self.registry, self.metadata)
        findings = inspect_block(classified, self.cfg, max_cycle_length=self.max_cycle_length)
        records = price_findings(findings, self.cfg, self.oracle)
        return block, findings, records


def run_inspection(cfg: ChainConfig, blocks: Iterable, state, store=None, *, parallelism: int = 1,
                   native_hop: Optional[bool] = None, progress_every: int = 100,
                   progress: Optional[Callable[[InspectionSummary], None]] = None,
                   on_block: Optional[Callable] = None) -> InspectionSummary:
    """Inspect ``blocks`` with up to ``parallelism`` workers; persistence stays in block order.

    ``on_block(block, findings, records)`` is called in order after each
    block is persisted.
    """
    inspector = BlockInspector(cfg, state, native_hop=native_hop)
    summary = InspectionSummary()
    started = time.perf_counter()
    results = ordered_map(inspector, blocks, parallelism,
                          on_error=lambda b, exc: InspectionError(getattr(b, "number", -1), exc))
    for block, findings, records in results:
        if store is not None:
            try:
                changed = store.persist_block_findings(
                    cfg.chain_id, block.number, block.timestamp, records, findings.diagnostics.as_dict()
                )
            except Exception as exc:
                raise InspectionError(block.number, exc) from exc
            summary.written += int(changed)
        summary.blocks += 1
        if summary.first_block is None:
            summary.first_block = block.number
        summary.last_block = block.number
        summary.findings.update(r.kind for r in records)
        summary.unpriced += sum(1 for r in records if not r.priced)
        if on_block is not None:
            on_block(block, findings, records)
        if progress is not None and progress_every and summary.blocks % progress_every == 0:
            summary.elapsed = time.perf_counter() - started
            progress(summary)
    summary.elapsed = time.perf_counter() - started
    return summary
