"""Same-pool sandwich detection within a block."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

from ..decoder.classify import ClassifiedBlock
from ..decoder.events import SwapEvent


@dataclass(frozen=True)
class Sandwich:
    block_number: int
    frontrun: SwapEvent
    victims: Tuple[SwapEvent, ...]
    backrun: SwapEvent
    profit_token: str
    profit_raw: int

    @property
    def tx_hash(self) -> str:
        return self.backrun.tx_hash

    @property
    def tx_index(self) -> int:
        return self.backrun.tx_index

    @property
    def pool(self) -> str:
        return self.frontrun.pool

    @property
    def swap_keys(self) -> list:
        return [self.frontrun.key, *(v.key for v in self.victims), self.backrun.key]


def detect_sandwiches(block: ClassifiedBlock, claimed: Optional[Iterable[tuple]] = None) -> list:
    """Greedy per-pool scan in transaction order.

    For each unclaimed swap taken as a front-run, the first later swap by the
    same initiator in the opposite direction that encloses at least one
    same-direction swap by someone else closes the sandwich. ``claimed`` holds
    ``(tx_hash, log_index)`` keys that may not be reused.
    """
    taken = set(claimed or ())
    by_pool: dict = {}
    for s in block.swaps:
        by_pool.setdefault(s.pool, []).append(s)
    found = []
    for pool in sorted(by_pool):
        swaps = sorted(by_pool[pool], key=lambda s: (s.tx_index, s.log_index))
        for f in swaps:
            if f.key in taken:
                continue
            hit = _close(f, swaps, taken)
            if hit is None:
                continue
            victims, b = hit
            taken.update(x.key for x in (f, *victims, b))
            found.append(Sandwich(
                block_number=block.block_number,
                frontrun=f,
                victims=tuple(victims),
                backrun=b,
                profit_token=f.token_in,
                profit_raw=b.amount_out - f.amount_in,
            ))
    found.sort(key=lambda s: (s.frontrun.tx_index, s.frontrun.log_index))
    return found


def _close(f: SwapEvent, swaps, taken):
    reverse = (f.token_out, f.token_in)
    for b in swaps:
        if b.tx_index <= f.tx_index or b.key in taken:
            continue
        if b.initiator != f.initiator or b.direction != reverse:
            continue
        victims = [
            v for v in swaps
            if f.tx_index < v.tx_index < b.tx_index
            and v.key not in taken
            and v.direction == f.direction
            and v.initiator != f.initiator
        ]
        if victims:
            return victims, b
    return None
