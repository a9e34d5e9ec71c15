"""Combine the three detectors into per-block findings."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

from ..decoder.classify import ClassifiedBlock, Diagnostics
from .arbitrage import DEFAULT_MAX_CYCLE_LENGTH, Arbitrage, detect_arbitrages
from .sandwich import Sandwich, detect_sandwiches


@dataclass(frozen=True)
class MevFindings:
    block_number: int
    timestamp: int
    arbitrages: Tuple[Arbitrage, ...] = ()
    sandwiches: Tuple[Sandwich, ...] = ()
    liquidations: tuple = ()
    diagnostics: Diagnostics = field(default_factory=Diagnostics, compare=False)

    @property
    def count(self) -> int:
        return len(self.arbitrages) + len(self.sandwiches) + len(self.liquidations)

    def claimed_keys(self) -> list:
        keys = [k for a in self.arbitrages for k in a.swap_keys]
        keys += [k for s in self.sandwiches for k in s.swap_keys]
        return keys


def extract_liquidations(block: ClassifiedBlock) -> list:
    return list(block.liquidations)


def inspect_block(block: ClassifiedBlock, cfg=None, *, sandwiches_possible: Optional[bool] = None,
                  max_cycle_length: int = DEFAULT_MAX_CYCLE_LENGTH) -> MevFindings:
    """Arbitrages first; their swaps are off limits to sandwich legs."""
    if sandwiches_possible is None:
        sandwiches_possible = True if cfg is None else cfg.sandwiches_possible
    arbs = []
    for group in block.groups:
        if len(group.swaps) >= 2:
            arbs.extend(detect_arbitrages(group.swaps, max_cycle_length))
    claimed = {k for a in arbs for k in a.swap_keys}
    sandwiches = detect_sandwiches(block, claimed) if sandwiches_possible else []
    return MevFindings(
        block_number=block.block_number,
        timestamp=block.timestamp,
        arbitrages=tuple(arbs),
        sandwiches=tuple(sandwiches),
        liquidations=tuple(extract_liquidations(block)),
        diagnostics=block.diagnostics,
    )
