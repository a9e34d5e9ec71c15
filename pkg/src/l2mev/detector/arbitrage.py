"""Atomic (intra-transaction) arbitrage cycle extraction."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

from ..decoder.events import SwapEvent

DEFAULT_MAX_CYCLE_LENGTH = 8


@dataclass(frozen=True)
class Arbitrage:
    tx_hash: str
    block_number: int
    path: Tuple[SwapEvent, ...]
    profit_token: str
    start_amount: int
    end_amount: int
    profit_raw: int

    @property
    def tx_index(self) -> int:
        return self.path[0].tx_index

    @property
    def profitable(self) -> bool:
        return self.profit_raw > 0

    @property
    def swap_keys(self) -> list:
        return [s.key for s in self.path]


def _is_cycle(path: Sequence[SwapEvent]) -> bool:
    return (
        len(path) >= 2
        and path[0].token_in == path[-1].token_out
        and len({s.pool for s in path}) >= 2
    )


def make_arbitrage(path: Sequence[SwapEvent]) -> Arbitrage:
    first, last = path[0], path[-1]
    return Arbitrage(
        tx_hash=first.tx_hash,
        block_number=first.block_number,
        path=tuple(path),
        profit_token=first.token_in,
        start_amount=first.amount_in,
        end_amount=last.amount_out,
        profit_raw=last.amount_out - first.amount_in,
    )


def detect_arbitrages(tx_swaps: Sequence[SwapEvent], max_length: int = DEFAULT_MAX_CYCLE_LENGTH) -> list:
    """Extract disjoint closed swap cycles from one transaction.

    Swaps are taken in log order. Starting from the earliest unused swap, the
    longest chain (``token_out`` feeding the next ``token_in``, log indices
    increasing) that returns to the starting token across at least two pools
    is claimed; ties go to the lexicographically earliest log sequence.
    Cycles with zero or negative profit are still returned.
    """
    swaps = sorted(tx_swaps, key=lambda s: s.log_index)
    if len({s.tx_hash for s in swaps}) > 1:
        raise ValueError("detect_arbitrages expects swaps from a single transaction")
    n = len(swaps)
    used = [False] * n
    found = []
    for i in range(n):
        if used[i]:
            continue
        best = _longest_cycle_from(swaps, used, i, max_length)
        if best:
            for j in best:
                used[j] = True
            found.append(make_arbitrage([swaps[j] for j in best]))
    return found


def _longest_cycle_from(swaps, used, start, max_length):
    target = swaps[start].token_in
    best: list = []
    path = [start]

    def extend(last, token):
        nonlocal best
        if len(path) >= max_length:
            return
        for j in range(last + 1, len(swaps)):
            s = swaps[j]
            if used[j] or s.token_in != token:
                continue
            path.append(j)
            if s.token_out == target and len(path) > len(best) and _is_cycle([swaps[k] for k in path]):
                best = list(path)
            extend(j, s.token_out)
            path.pop()

    extend(start, swaps[start].token_out)
    return best
