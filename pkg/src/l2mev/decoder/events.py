"""Typed swap/liquidation events and their log decoders."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..abi import topic_address, word_address, word_int, word_uint, words
from ..ingestion.metadata import PoolMetadata
from ..ingestion.model import LogRecord


class DecodeError(ValueError):
    """Log does not match the expected event layout."""


class MalformedSwap(DecodeError):
    """Swap amounts do not describe a single in/out direction."""


class InvalidEvent(DecodeError):
    """Decoded fields violate an event invariant (e.g. zero amounts)."""


@dataclass(frozen=True)
class SwapEvent:
    tx_hash: str
    block_number: int
    log_index: int
    pool: str
    token_in: str
    token_out: str
    amount_in: int
    amount_out: int
    initiator: str
    recipient: str
    tx_index: int = 0

    def __post_init__(self):
        if self.token_in == self.token_out:
            raise InvalidEvent("token_in equals token_out")
        if self.amount_in <= 0 or self.amount_out <= 0:
            raise InvalidEvent("swap amounts must be positive")

    @property
    def key(self) -> tuple:
        return (self.tx_hash, self.log_index)

    @property
    def direction(self) -> tuple:
        return (self.token_in, self.token_out)


@dataclass(frozen=True)
class LiquidationEvent:
    tx_hash: str
    block_number: int
    log_index: int
    protocol: str
    liquidator: str
    borrower: str
    debt_token: str
    debt_repaid: int
    collateral_token: str
    collateral_seized: int
    tx_index: int = 0

    def __post_init__(self):
        if self.debt_repaid <= 0:
            raise InvalidEvent("debt_repaid must be positive")
        if self.collateral_seized <= 0:
            raise InvalidEvent("collateral_seized must be positive")

    @property
    def key(self) -> tuple:
        return (self.tx_hash, self.log_index)


def _data_words(log: LogRecord, need: int) -> list:
    if len(log.data) < 32 * need:
        raise DecodeError(f"log {log.log_index}: expected {need} data words, got {len(log.data) // 32}")
    return words(log.data[: 32 * need])


def _recipient(log: LogRecord) -> str:
    return topic_address(log.topics[2]) if len(log.topics) > 2 else ""


def decode_v2_swap(log: LogRecord, meta: PoolMetadata, *, tx_hash: str = "", block_number: int = 0,
                   initiator: str = "", tx_index: int = 0) -> SwapEvent:
    """Decode a Uniswap-V2 style ``Swap(sender, a0In, a1In, a0Out, a1Out, to)``.

    In and Out of the same token are netted. A swap paying in both tokens, or
    whose netted flows are not one positive-in and one positive-out token, is
    rejected as :class:`MalformedSwap`.
    """
    if meta.family != "v2":
        raise DecodeError(f"pool {meta.pool} is not a v2 pool")
    a0_in, a1_in, a0_out, a1_out = (word_uint(w) for w in _data_words(log, 4))
    if a0_in and a1_in:
        raise MalformedSwap(f"log {log.log_index}: both tokens paid in")
    net0, net1 = a0_in - a0_out, a1_in - a1_out
    if net0 > 0 and net1 < 0:
        token_in, token_out, amount_in, amount_out = meta.token0, meta.token1, net0, -net1
    elif net1 > 0 and net0 < 0:
        token_in, token_out, amount_in, amount_out = meta.token1, meta.token0, net1, -net0
    else:
        raise MalformedSwap(f"log {log.log_index}: ambiguous direction ({a0_in},{a1_in},{a0_out},{a1_out})")
    return SwapEvent(tx_hash, block_number, log.log_index, log.address, token_in, token_out,
                     amount_in, amount_out, initiator, _recipient(log), tx_index)


def decode_v3_swap(log: LogRecord, meta: PoolMetadata, *, tx_hash: str = "", block_number: int = 0,
                   initiator: str = "", tx_index: int = 0) -> SwapEvent:
    """Decode a Uniswap-V3 style swap; positive amounts flowed into the pool."""
    if meta.family != "v3":
        raise DecodeError(f"pool {meta.pool} is not a v3 pool")
    w = _data_words(log, 5)
    amount0, amount1 = word_int(w[0]), word_int(w[1])
    if amount0 > 0 and amount1 < 0:
        token_in, token_out, amount_in, amount_out = meta.token0, meta.token1, amount0, -amount1
    elif amount1 > 0 and amount0 < 0:
        token_in, token_out, amount_in, amount_out = meta.token1, meta.token0, amount1, -amount0
    else:
        raise MalformedSwap(f"log {log.log_index}: amounts ({amount0}, {amount1}) lack opposite signs")
    return SwapEvent(tx_hash, block_number, log.log_index, log.address, token_in, token_out,
                     amount_in, amount_out, initiator, _recipient(log), tx_index)


def decode_liquidation(log: LogRecord, kind: Optional[str] = None, *, tx_hash: str = "", block_number: int = 0,
                       tx_index: int = 0) -> LiquidationEvent:
    """Decode Aave ``LiquidationCall`` or Compound ``LiquidateBorrow``.

    ``kind`` defaults to Aave layout when the log has four topics.
    """
    if kind is None:
        kind = "liquidation_aave" if len(log.topics) == 4 else "liquidation_compound"
    if kind == "liquidation_aave":
        # topics: sig, collateralAsset, debtAsset, user
        if len(log.topics) != 4:
            raise DecodeError(f"log {log.log_index}: LiquidationCall needs 4 topics, got {len(log.topics)}")
        w = _data_words(log, 4)
        return LiquidationEvent(
            tx_hash, block_number, log.log_index, "aave",
            liquidator=word_address(w[2]),
            borrower=topic_address(log.topics[3]),
            debt_token=topic_address(log.topics[2]),
            debt_repaid=word_uint(w[0]),
            collateral_token=topic_address(log.topics[1]),
            collateral_seized=word_uint(w[1]),
            tx_index=tx_index,
        )
    if kind == "liquidation_compound":
        # no indexed args; the emitting cToken is the debt market
        if len(log.topics) != 1:
            raise DecodeError(f"log {log.log_index}: LiquidateBorrow needs 1 topic, got {len(log.topics)}")
        w = _data_words(log, 5)
        return LiquidationEvent(
            tx_hash, block_number, log.log_index, "compound",
            liquidator=word_address(w[0]),
            borrower=word_address(w[1]),
            debt_token=log.address,
            debt_repaid=word_uint(w[2]),
            collateral_token=word_address(w[3]),
            collateral_seized=word_uint(w[4]),
            tx_index=tx_index,
        )
    raise DecodeError(f"not a liquidation kind: {kind!r}")
