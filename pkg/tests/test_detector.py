import random
from itertools import groupby

import pytest

from l2mev.decoder.classify import ClassifiedBlock, Diagnostics, TxEvents
from l2mev.decoder.events import LiquidationEvent
from l2mev.detector import detect_arbitrages, detect_sandwiches, extract_liquidations, inspect_block
from conftest import addr, swap
from oracles import all_cycles, brute_force_arbitrages

A, B, C, D = addr(0xA), addr(0xB), addr(0xC), addr(0xD)
P1, P2, P3 = addr(0x101), addr(0x102), addr(0x103)
X, Y, Z = addr(0xF1), addr(0xF2), addr(0xF3)


def block_of(swaps, liquidations=(), number=1):
    groups = []
    events = sorted([*swaps, *liquidations], key=lambda e: (e.tx_index, e.log_index))
    for idx, evs in groupby(events, key=lambda e: e.tx_index):
        evs = list(evs)
        sw = tuple(e for e in evs if hasattr(e, "pool"))
        init = sw[0].initiator if sw else addr(0)
        groups.append(TxEvents(evs[0].tx_hash, idx, init, sw, tuple(e for e in evs if not hasattr(e, "pool"))))
    return ClassifiedBlock(number, 1_600_000_000, tuple(groups), Diagnostics())


def test_two_leg_arbitrage():
    arbs = detect_arbitrages([swap(P1, A, B, 100, 50, 0), swap(P2, B, A, 50, 103, 1)])
    assert len(arbs) == 1
    a = arbs[0]
    assert (a.profit_token, a.start_amount, a.end_amount, a.profit_raw) == (A, 100, 103, 3)


def test_single_swap_is_not_arbitrage():
    assert detect_arbitrages([swap(P1, A, B, 100, 50, 0)]) == []


def test_same_pool_round_trip_excluded():
    assert detect_arbitrages([swap(P1, A, B, 100, 50, 0), swap(P1, B, A, 50, 103, 1)]) == []


def test_three_leg_cycle():
    arbs = detect_arbitrages([swap(P1, A, B, 10, 20, 0), swap(P2, B, C, 20, 30, 1), swap(P3, C, A, 30, 9, 2)])
    assert [len(a.path) for a in arbs] == [3]
    assert arbs[0].profit_raw == -1


def test_empty_input():
    assert detect_arbitrages([]) == []


def test_longest_cycle_preferred():
    # A->B->A closes early but A->B->C->A uses more swaps
    swaps = [swap(P1, A, B, 10, 10, 0), swap(P2, B, A, 10, 11, 1), swap(P2, B, C, 10, 10, 2),
             swap(P3, C, A, 10, 12, 3)]
    arbs = detect_arbitrages(swaps)
    assert [tuple(s.log_index for s in a.path) for a in arbs] == [(0, 2, 3)]


def test_disjoint_cycles_in_one_tx():
    swaps = [swap(P1, A, B, 1, 1, 0), swap(P2, B, A, 1, 2, 1), swap(P1, C, D, 1, 1, 2), swap(P3, D, C, 1, 2, 3)]
    assert len(detect_arbitrages(swaps)) == 2


def test_max_length_bounds_search():
    swaps = [swap(P1, A, B, 1, 1, 0), swap(P2, B, C, 1, 1, 1), swap(P3, C, A, 1, 2, 2)]
    assert detect_arbitrages(swaps, max_length=2) == []


def random_tx(rng, n_swaps, tokens=(A, B, C, D), pools=(P1, P2, P3)):
    out = []
    for i in range(n_swaps):
        tin, tout = rng.sample(tokens, 2)
        out.append(swap(rng.choice(pools), tin, tout, rng.randint(1, 100), rng.randint(1, 100), i))
    return out


def test_matches_brute_force_on_random_transactions():
    rng = random.Random(11)
    for _ in range(1000):
        swaps = random_tx(rng, rng.randint(0, 6))
        got = [tuple(s.key for s in a.path) for a in detect_arbitrages(swaps)]
        assert got == brute_force_arbitrages(swaps)


def test_no_cycle_left_among_unused_swaps():
    rng = random.Random(5)
    for _ in range(300):
        swaps = random_tx(rng, rng.randint(2, 6))
        used = {s.key for a in detect_arbitrages(swaps) for s in a.path}
        rest = [s for s in swaps if s.key not in used]
        assert all_cycles(rest) == []


def test_profit_is_last_out_minus_first_in():
    rng = random.Random(3)
    for _ in range(200):
        for a in detect_arbitrages(random_tx(rng, 6)):
            assert a.profit_raw == a.path[-1].amount_out - a.path[0].amount_in


# -- sandwiches ------------------------------------------------------------

WEI = 10 ** 18


def classic(backrun_initiator=X):
    return [
        swap(P1, A, B, 10 * WEI, 20_000, 0, tx="0x1", initiator=X, tx_index=1),
        swap(P1, A, B, 1 * WEI, 1_900, 1, tx="0x2", initiator=Y, tx_index=2),
        swap(P1, B, A, 20_000, 104 * WEI // 10, 2, tx="0x3", initiator=backrun_initiator, tx_index=3),
    ]


def exhaustive_sandwiches(swaps):
    out = []
    for f in swaps:
        for b in swaps:
            if b.tx_index <= f.tx_index or b.initiator != f.initiator or b.pool != f.pool:
                continue
            if (b.token_in, b.token_out) != (f.token_out, f.token_in):
                continue
            vs = [v for v in swaps if f.tx_index < v.tx_index < b.tx_index and v.pool == f.pool
                  and v.initiator != f.initiator and (v.token_in, v.token_out) == (f.token_in, f.token_out)]
            if vs:
                out.append((f.key, tuple(v.key for v in vs), b.key))
    return out


def test_classic_sandwich():
    swaps = classic()
    found = detect_sandwiches(block_of(swaps))
    assert len(found) == 1
    s = found[0]
    assert s.profit_raw == 4 * WEI // 10 and s.profit_token == A
    assert s.tx_hash == "0x3"
    assert [(s.frontrun.key, tuple(v.key for v in s.victims), s.backrun.key)] == exhaustive_sandwiches(swaps)


def test_initiator_mismatch_is_not_sandwich():
    assert detect_sandwiches(block_of(classic(backrun_initiator=Z))) == []


def test_sandwiches_disabled_chain():
    assert inspect_block(block_of(classic()), sandwiches_possible=False).sandwiches == ()


def test_opposite_direction_swap_is_not_victim():
    swaps = classic()
    swaps[1] = swap(P1, B, A, 100, 1, 1, tx="0x2", initiator=Y, tx_index=2)
    assert detect_sandwiches(block_of(swaps)) == []


def test_backrun_that_closes_a_cycle_is_arbitrage_only():
    swaps = classic()[:2] + [
        swap(P1, B, A, 20_000, 11 * WEI, 2, tx="0x3", initiator=X, tx_index=3),
        swap(P2, A, B, 11 * WEI, 21_000, 3, tx="0x3", initiator=X, tx_index=3),
    ]
    f = inspect_block(block_of(swaps))
    assert len(f.arbitrages) == 1 and f.sandwiches == ()


def test_arbitrage_and_sandwich_in_distinct_swaps():
    arb = [swap(P2, C, D, 5, 5, 3, tx="0x4", initiator=Z, tx_index=4),
           swap(P3, D, C, 5, 6, 4, tx="0x4", initiator=Z, tx_index=4)]
    f = inspect_block(block_of(classic() + arb))
    assert (len(f.arbitrages), len(f.sandwiches)) == (1, 1)


def test_random_blocks_agree_with_exhaustive_search_when_unambiguous():
    rng = random.Random(2)
    checked = 0
    for _ in range(400):
        swaps = []
        for t in range(rng.randint(2, 5)):
            tin, tout = rng.sample((A, B), 2)
            swaps.append(swap(P1, tin, tout, 5, 5, t, tx=f"0x{t}", initiator=rng.choice((X, Y)), tx_index=t))
        triples = exhaustive_sandwiches(swaps)
        found = detect_sandwiches(block_of(swaps))
        if len(triples) <= 1:
            checked += 1
            assert [(s.frontrun.key, tuple(v.key for v in s.victims), s.backrun.key) for s in found] == triples
        keys = [k for s in found for k in s.swap_keys]
        assert len(keys) == len(set(keys))
    assert checked > 100


# -- liquidations ----------------------------------------------------------

def liq(log, tx="0x9", tx_index=5):
    return LiquidationEvent(tx, 1, log, "aave", X, Y, A, 150, B, 100, tx_index)


def test_liquidation_passthrough():
    assert len(extract_liquidations(block_of([], [liq(0)]))) == 1
    assert extract_liquidations(block_of([])) == []


def test_two_liquidations_one_tx():
    out = extract_liquidations(block_of([], [liq(0), liq(1)]))
    assert len(out) == 2 and {l.tx_hash for l in out} == {"0x9"}


def test_empty_block_empty_findings():
    f = inspect_block(block_of([]))
    assert (f.arbitrages, f.sandwiches, f.liquidations) == ((), (), ())


@pytest.mark.parametrize("n", [2, 3])
def test_detected_paths_chain_tokens(n):
    tokens = [A, B, C][:n]
    swaps = [swap([P1, P2, P3][i], tokens[i], tokens[(i + 1) % n], 10, 10, i) for i in range(n)]
    (a,) = detect_arbitrages(swaps)
    assert all(x.token_out == y.token_in for x, y in zip(a.path, a.path[1:]))
