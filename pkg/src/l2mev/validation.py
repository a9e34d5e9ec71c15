"""Input checks shared by the estimators."""
from __future__ import annotations

from numbers import Integral

from .decoder.classify import ClassifiedBlock
from .detector.inspect import MevFindings
from .ingestion.model import BlockData
from .pricing.records import PricedMevRecord


def _as_list(X, kind, name):
    if isinstance(X, kind):
        return [X]
    try:
        items = list(X)
    except TypeError:
        raise TypeError(f"expected an iterable of {kind.__name__}, got {type(X).__name__}") from None
    for i, item in enumerate(items):
        if not isinstance(item, kind):
            raise TypeError(f"{name}[{i}] is {type(item).__name__}, expected {kind.__name__}")
    return items


def check_blocks(X, ascending: bool = True) -> list:
    """Return ``X`` as a list of :class:`BlockData`; block numbers must be unique (and ascending)."""
    blocks = _as_list(X, BlockData, "blocks")
    seen = set()
    prev = -1
    for b in blocks:
        if b.number in seen:
            raise ValueError(f"block {b.number} appears twice")
        if ascending and b.number < prev:
            raise ValueError(f"blocks out of order: {b.number} after {prev}")
        seen.add(b.number)
        prev = b.number
    return blocks


def check_classified(X) -> list:
    blocks = _as_list(X, ClassifiedBlock, "classified")
    for b in blocks:
        prev = -1
        for g in b.groups:
            if g.index <= prev:
                raise ValueError(f"block {b.block_number}: groups not ordered by transaction index")
            prev = g.index
            for ev in (*g.swaps, *g.liquidations):
                if ev.block_number != b.block_number:
                    raise ValueError(f"event from block {ev.block_number} inside block {b.block_number}")
    return blocks


def check_findings(X) -> list:
    return _as_list(X, MevFindings, "findings")


def check_records(X) -> list:
    """Flatten a sequence of records, or of per-block record lists, into one list."""
    if isinstance(X, PricedMevRecord):
        return [X]
    out = []
    for item in X:
        if isinstance(item, PricedMevRecord):
            out.append(item)
        else:
            out.extend(_as_list(item, PricedMevRecord, "records"))
    return out


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
