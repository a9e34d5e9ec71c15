"""Per-block log classification into swap and liquidation events."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

from ..ingestion.metadata import PoolMetadata
from ..ingestion.model import BlockData
from .events import DecodeError, InvalidEvent, LiquidationEvent, MalformedSwap, SwapEvent, decode_liquidation, \
    decode_v2_swap, decode_v3_swap
from .registry import SWAP_KINDS, EventRegistry

MetadataSource = Callable[[str, str, Optional[int]], Optional[PoolMetadata]]


@dataclass
class Diagnostics:
    total_logs: int = 0
    decoded: int = 0
    ignored: int = 0
    malformed_swaps: int = 0
    decode_errors: int = 0
    invalid_events: int = 0
    unresolved_swaps: int = 0
    reverted_txs: int = 0
    unresolved_pools: set = field(default_factory=set)

    def merge(self, other: "Diagnostics") -> "Diagnostics":
        out = Diagnostics()
        for name in ("total_logs", "decoded", "ignored", "malformed_swaps", "decode_errors",
                     "invalid_events", "unresolved_swaps", "reverted_txs"):
            setattr(out, name, getattr(self, name) + getattr(other, name))
        out.unresolved_pools = self.unresolved_pools | other.unresolved_pools
        return out

    @property
    def accounted(self) -> int:
        return (self.decoded + self.ignored + self.malformed_swaps + self.decode_errors
                + self.invalid_events + self.unresolved_swaps)

    def as_dict(self) -> dict:
        return {
            "total_logs": self.total_logs,
            "decoded": self.decoded,
            "ignored": self.ignored,
            "malformed_swaps": self.malformed_swaps,
            "decode_errors": self.decode_errors,
            "invalid_events": self.invalid_events,
            "unresolved_swaps": self.unresolved_swaps,
            "reverted_txs": self.reverted_txs,
            "unresolved_pools": sorted(self.unresolved_pools),
        }


@dataclass(frozen=True)
class TxEvents:
    tx_hash: str
    index: int
    initiator: str
    swaps: Tuple[SwapEvent, ...] = ()
    liquidations: Tuple[LiquidationEvent, ...] = ()


@dataclass(frozen=True)
class ClassifiedBlock:
    block_number: int
    timestamp: int
    groups: Tuple[TxEvents, ...] = ()
    diagnostics: Diagnostics = field(default_factory=Diagnostics, compare=False)

    @property
    def swaps(self) -> list:
        return [s for g in self.groups for s in g.swaps]

    @property
    def liquidations(self) -> list:
        return [liq for g in self.groups for liq in g.liquidations]


def classify_block(block: BlockData, registry: EventRegistry, metadata_source: MetadataSource) -> ClassifiedBlock:
    diag = Diagnostics()
    groups = []
    for tx in block.transactions:
        if tx.reverted:
            diag.reverted_txs += 1
        swaps, liquidations = [], []
        for log in tx.logs:
            diag.total_logs += 1
            entry = registry.get(log.topics[0]) if log.topics else None
            if entry is None:
                diag.ignored += 1
                continue
            ctx = dict(tx_hash=tx.hash, block_number=block.number, tx_index=tx.index)
            try:
                if entry.kind in SWAP_KINDS:
                    family = SWAP_KINDS[entry.kind]
                    meta = metadata_source(log.address, family, block.number)
                    if meta is None:
                        diag.unresolved_swaps += 1
                        diag.unresolved_pools.add(log.address)
                        continue
                    decode = decode_v2_swap if family == "v2" else decode_v3_swap
                    swaps.append(decode(log, meta, initiator=tx.sender, **ctx))
                else:
                    liquidations.append(decode_liquidation(log, entry.kind, **ctx))
            except MalformedSwap:
                diag.malformed_swaps += 1
                continue
            except InvalidEvent:
                diag.invalid_events += 1
                continue
            except DecodeError:
                diag.decode_errors += 1
                continue
            diag.decoded += 1
        groups.append(TxEvents(tx.hash, tx.index, tx.sender, tuple(swaps), tuple(liquidations)))
    return ClassifiedBlock(block.number, block.timestamp, tuple(groups), diag)
