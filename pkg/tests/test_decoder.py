import pytest

from l2mev.abi import address_topic, encode_address, encode_int, encode_uint
from l2mev.decoder import (
    DecodeError,
    InvalidEvent,
    MalformedSwap,
    build_registry,
    classify_block,
    decode_liquidation,
    decode_v2_swap,
    decode_v3_swap,
)
from l2mev.ingestion.metadata import PoolMetadata
from l2mev.ingestion.model import REVERTED, SUCCESS, BlockData, LogRecord, TransactionRecord
from l2mev.synthetic import (
    AAVE_LIQUIDATION,
    COMPOUND_LIQUIDATION,
    TRANSFER,
    V2_SWAP,
    V3_SWAP,
)
from conftest import addr

USDC, WETH = addr(0x10), addr(0x20)
POOL2, POOL3 = addr(0xA2), addr(0xA3)
META2 = PoolMetadata(POOL2, USDC, WETH, 6, 18, "v2")
META3 = PoolMetadata(POOL3, USDC, WETH, 6, 18, "v3", 500)
SENDER = addr(0x99)


def v2_log(*amounts, index=0):
    return LogRecord(POOL2, (V2_SWAP, address_topic(SENDER), address_topic(SENDER)),
                     b"".join(encode_uint(a) for a in amounts), index)


def v3_log(a0, a1, index=0):
    data = encode_int(a0) + encode_int(a1) + encode_uint(2 ** 96) + encode_uint(10 ** 18) + encode_int(-5)
    return LogRecord(POOL3, (V3_SWAP, address_topic(SENDER), address_topic(SENDER)), data, index)


def test_v2_token0_in():
    s = decode_v2_swap(v2_log(1000, 0, 0, 600), META2)
    assert (s.token_in, s.amount_in, s.token_out, s.amount_out) == (USDC, 1000, WETH, 600)


def test_v2_mirrored_direction():
    s = decode_v2_swap(v2_log(0, 5, 7, 0), META2)
    assert (s.token_in, s.amount_in, s.token_out, s.amount_out) == (WETH, 5, USDC, 7)


def test_v2_both_inputs_is_malformed():
    with pytest.raises(MalformedSwap):
        decode_v2_swap(v2_log(3, 4, 0, 9), META2)


def test_v2_same_token_in_and_out_is_netted():
    # token0 in 10 and out 4 nets to 6 in
    s = decode_v2_swap(v2_log(10, 0, 4, 9), META2)
    assert (s.token_in, s.amount_in, s.amount_out) == (USDC, 6, 9)


def test_v2_nothing_moving_is_malformed():
    with pytest.raises(MalformedSwap):
        decode_v2_swap(v2_log(0, 0, 0, 0), META2)


def test_v2_short_data_is_decode_error():
    log = LogRecord(POOL2, (V2_SWAP,), encode_uint(1) * 3, 0)
    with pytest.raises(DecodeError):
        decode_v2_swap(log, META2)


def test_v3_sign_convention():
    s = decode_v3_swap(v3_log(1000, -600), META3)
    assert (s.token_in, s.amount_in, s.token_out, s.amount_out) == (USDC, 1000, WETH, 600)
    s = decode_v3_swap(v3_log(-250, 80), META3)
    assert (s.token_in, s.amount_in, s.token_out, s.amount_out) == (WETH, 80, USDC, 250)


@pytest.mark.parametrize("a0,a1", [(5, 5), (-5, -5), (0, -3), (7, 0)])
def test_v3_invalid_signs(a0, a1):
    with pytest.raises(MalformedSwap):
        decode_v3_swap(v3_log(a0, a1), META3)


def aave_log(debt=150, coll=100, index=0, topics=None):
    topics = topics or (AAVE_LIQUIDATION, address_topic(addr(0xC0)), address_topic(addr(0xD0)),
                        address_topic(addr(0xB0)))
    data = encode_uint(debt) + encode_uint(coll) + encode_address(addr(0x11)) + encode_uint(1)
    return LogRecord(addr(0x77), topics, data, index)


def test_aave_liquidation_round_trip():
    ev = decode_liquidation(aave_log(), tx_hash="0xfeed", block_number=9)
    assert ev.protocol == "aave"
    assert (ev.collateral_token, ev.debt_token, ev.borrower, ev.liquidator) == (addr(0xC0), addr(0xD0), addr(0xB0),
                                                                                addr(0x11))
    assert (ev.debt_repaid, ev.collateral_seized, ev.block_number) == (150, 100, 9)


def test_compound_liquidation_debt_token_is_emitter():
    data = encode_address(addr(0x11)) + encode_address(addr(0xB0)) + encode_uint(40) + encode_address(addr(0xC1)) \
        + encode_uint(7)
    ev = decode_liquidation(LogRecord(addr(0xCD), (COMPOUND_LIQUIDATION,), data, 3))
    assert (ev.protocol, ev.debt_token, ev.collateral_token, ev.debt_repaid, ev.collateral_seized) == (
        "compound", addr(0xCD), addr(0xC1), 40, 7)


def test_liquidation_wrong_topic_count():
    with pytest.raises(DecodeError):
        decode_liquidation(aave_log(topics=(AAVE_LIQUIDATION, address_topic(addr(1)))), "liquidation_aave")


def test_liquidation_zero_debt_is_invalid():
    with pytest.raises(InvalidEvent):
        decode_liquidation(aave_log(debt=0))


def _tx(i, logs, status=SUCCESS, sender=SENDER):
    return TransactionRecord(f"0x{i:064x}", i, sender, addr(0x55), 21000, status, tuple(logs))


def _meta(pool, family, block):
    return {POOL2: META2, POOL3: META3}.get(pool)


def test_classify_groups_by_transaction():
    block = BlockData(5, 1000, (
        _tx(0, [v2_log(1000, 0, 0, 600, index=0), v3_log(-900, 600, index=1)]),
        _tx(1, [aave_log(index=2)]),
    ))
    cb = classify_block(block, build_registry(), _meta)
    assert [(len(g.swaps), len(g.liquidations)) for g in cb.groups] == [(2, 0), (0, 1)]
    assert cb.diagnostics.decoded == 3
    assert cb.swaps[1].initiator == SENDER


def test_classify_unregistered_only():
    transfer = LogRecord(USDC, (TRANSFER, address_topic(SENDER), address_topic(POOL2)), encode_uint(5), 0)
    cb = classify_block(BlockData(1, 0, (_tx(0, [transfer]),)), build_registry(), _meta)
    assert all(not g.swaps and not g.liquidations for g in cb.groups)
    d = cb.diagnostics
    assert (d.malformed_swaps, d.decode_errors, d.invalid_events, d.unresolved_swaps, d.decoded) == (0, 0, 0, 0, 0)
    assert d.ignored == 1


def test_classify_empty_block():
    cb = classify_block(BlockData(1, 0, ()), build_registry(), _meta)
    assert cb.groups == () and cb.swaps == []


def test_classify_counts_every_log():
    ghost = LogRecord(addr(0xDEAD), v2_log(1, 0, 0, 1).topics, v2_log(1, 0, 0, 1).data, 2)
    block = BlockData(1, 0, (
        _tx(0, [v2_log(3, 4, 0, 9, index=0), aave_log(debt=0, index=1), ghost]),
        _tx(1, [], status=REVERTED),
    ))
    cb = classify_block(block, build_registry(), _meta)
    d = cb.diagnostics
    assert (d.malformed_swaps, d.invalid_events, d.unresolved_swaps, d.reverted_txs) == (1, 1, 1, 1)
    assert d.accounted == d.total_logs == 3
    assert d.unresolved_pools == {addr(0xDEAD)}
