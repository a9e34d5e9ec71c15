import random
from decimal import Decimal
from fractions import Fraction

import mpmath
import pytest

from l2mev.detector.inspect import MevFindings
from l2mev.decoder.events import LiquidationEvent
from l2mev.detector.arbitrage import make_arbitrage
from l2mev.ingestion.rpc import RpcUnreachable
from l2mev.pricing import (
    DIRECT_USDC,
    UNPRICED,
    VIA_NATIVE,
    PriceOracle,
    find_usdc_pool,
    price_findings,
    price_token_usd,
    quantize_usd,
    spot_price_v2,
    spot_price_v3,
)
from l2mev.synthetic import ChainBuilder, standard_builder
from conftest import swap

Q96 = 2 ** 96


def rel_err(got, exact):
    return abs(Fraction(got) - exact) / exact


# -- spot math -------------------------------------------------------------

def test_v2_usdc_weth_example():
    assert spot_price_v2(2_000_000_000, 10 ** 18, 6, 18) == Decimal(2000)


def test_v2_equal_reserves_identity():
    assert spot_price_v2(1, 1, 18, 18) == Decimal(1)


def test_v2_drained():
    assert spot_price_v2(5, 0, 6, 18) is None
    assert spot_price_v2(0, 5, 6, 18) is None


def test_v3_identity_point():
    assert spot_price_v3(Q96, 18, 18) == Decimal(1)


def test_v3_double_sqrt_price():
    assert spot_price_v3(2 ** 97, 6, 6) == Decimal("0.25")


def test_v3_zero():
    assert spot_price_v3(0, 6, 18) is None


def test_spot_prices_against_exact_rationals():
    rng = random.Random(1)
    for _ in range(1000):
        d0, d1 = rng.randint(0, 24), rng.randint(0, 24)
        r0, r1 = rng.randint(1, 2 ** 112 - 1), rng.randint(1, 2 ** 112 - 1)
        exact = Fraction(r0, r1) * Fraction(10) ** (d1 - d0)
        assert rel_err(spot_price_v2(r0, r1, d0, d1), exact) <= Fraction(1, 10 ** 12)
        s = rng.randint(1, 2 ** 160 - 1)
        exact = (Fraction(Q96, s) ** 2) * Fraction(10) ** (d1 - d0)
        assert rel_err(spot_price_v3(s, d0, d1), exact) <= Fraction(1, 10 ** 12)


def test_v3_against_mpmath():
    rng = random.Random(2)
    with mpmath.workdps(80):
        for _ in range(200):
            d0, d1, s = rng.randint(0, 24), rng.randint(0, 24), rng.randint(2 ** 40, 2 ** 160 - 1)
            ref = mpmath.power(mpmath.mpf(2) ** 96 / s, 2) * mpmath.power(10, d1 - d0)
            got = mpmath.mpf(str(spot_price_v3(s, d0, d1)))
            assert abs(got - ref) / ref < mpmath.mpf("1e-12")


def test_quantize_half_even():
    assert quantize_usd(Fraction(25, 10 ** 7)) == Decimal("0.000002")
    assert quantize_usd(Fraction(35, 10 ** 7)) == Decimal("0.000004")
    assert quantize_usd(Fraction(-15, 10 ** 7)) == Decimal("-0.000002")


# -- pool discovery and routing --------------------------------------------

def small_chain(native_usdc_price="0.5"):
    b = ChainBuilder(chain_id=1)
    usdc = b.token("USDC", 6, 1)
    nat = b.token("WNATIVE", 18, native_usdc_price)
    tok = b.token("TOK", 18)
    lone = b.token("LONE", 9)
    fa = b.factory("v2", "v2")
    b.v2_pool(fa, usdc, nat)
    # 1 TOK = 3 WNATIVE
    b.v2_pool(fa, tok, nat, reserves=b.v2_reserves(tok, nat, 3000, price_a=3, price_b=1))
    return b, usdc, nat, tok, lone


class CountingState:
    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    def call(self, to, data, block):
        self.calls += 1
        return self.inner.call(to, data, block)


def test_usdc_is_numeraire():
    b, usdc, *_ = small_chain()
    p = price_token_usd(b.config(), usdc, 5, PriceOracle(b.config(), b.chain))
    assert (p.usd_price, p.route) == (1, DIRECT_USDC)


def test_self_pairing_rejected():
    b, usdc, *_ = small_chain()
    assert find_usdc_pool(b.config(), usdc, 5, PriceOracle(b.config(), b.chain)) is None


def test_v2_pair_found():
    b, usdc, nat, *_ = small_chain()
    ref = find_usdc_pool(b.config(), nat, 5, PriceOracle(b.config(), b.chain))
    assert ref.address == b.pools_by_pair[frozenset((usdc, nat))][0] and ref.family == "v2"


def test_native_route_is_exact_product():
    b, usdc, nat, tok, _ = small_chain("0.5")
    p = PriceOracle(b.config(), b.chain).price_token_usd(tok, 5)
    assert p.route == VIA_NATIVE
    assert p.usd_price == Fraction(3) * Fraction(1, 2)
    assert len(p.source_pools) == 2


def test_native_route_can_be_disabled():
    b, _, _, tok, _ = small_chain()
    assert PriceOracle(b.config(), b.chain, native_hop=False).price_token_usd(tok, 5).route == UNPRICED


def test_no_pool_is_unpriced():
    b, *_, lone = small_chain()
    p = PriceOracle(b.config(), b.chain).price_token_usd(lone, 5)
    assert p.usd_price is None and p.route == UNPRICED


def test_v3_tier_with_more_liquidity_wins():
    b = ChainBuilder(chain_id=1)
    usdc, nat, weth = b.token("USDC", 6, 1), b.token("WNATIVE", 18, 1), b.token("WETH", 18, 2000)
    f = b.factory("v3", "v3", (500, 3000, 10000))
    b.v3_pool(f, usdc, weth, 500, liquidity=10, price_b_in_a=1999)
    deep = b.v3_pool(f, usdc, weth, 3000, liquidity=10 ** 20, price_b_in_a=2001)
    b.v3_pool(f, usdc, weth, 10000, liquidity=0, price_b_in_a=5)
    oracle = PriceOracle(b.config(), b.chain)
    ref = oracle.find_usdc_pool(weth, 1)
    assert (ref.address, ref.fee_tier) == (deep, 3000)
    assert abs(oracle.price_token_usd(weth, 1).usd_price - 2001) < Fraction(1, 10 ** 9)


def test_first_factory_in_config_order_wins():
    b = standard_builder()
    t = b.tokens
    ref = PriceOracle(b.config(), b.chain).find_usdc_pool(t["WETH"], 1)
    assert ref.factory == b.factories[0].address


def test_drained_direct_pool_falls_back_to_native():
    b, usdc, nat, tok, _ = small_chain()
    fa = b.factories[0].address
    direct = b.v2_pool(fa, tok, usdc, reserves=(0, 0))
    assert direct
    assert PriceOracle(b.config(), b.chain).price_token_usd(tok, 5).route == VIA_NATIVE


def test_pool_lookup_memoised_and_price_cached():
    b, usdc, nat, tok, _ = small_chain()
    state = CountingState(b.chain)
    oracle = PriceOracle(b.config(), state)
    oracle.price_token_usd(tok, 5)
    first = state.calls
    oracle.price_token_usd(tok, 5)
    assert state.calls == first
    oracle.price_token_usd(tok, 6)
    # later block: reserves re-read but no factory lookups
    assert 0 < state.calls - first < first


def test_price_is_pinned_to_block():
    b, usdc, nat, tok, _ = small_chain()
    pool = b.pools_by_pair[frozenset((usdc, nat))][0]
    r = b.v2_reserves(usdc, nat, 1000, 1, "0.25")
    b.chain.set_state(pool, 11, r)
    oracle = PriceOracle(b.config(), b.chain)
    assert oracle.price_token_usd(nat, 10).usd_price == Fraction(1, 2)
    assert oracle.price_token_usd(nat, 11).usd_price == Fraction(1, 4)


def test_rpc_failure_is_not_unpriced():
    b, _, nat, *_ = small_chain()

    class Down:
        def call(self, *a):
            raise RpcUnreachable("node down")

    with pytest.raises(RpcUnreachable):
        PriceOracle(b.config(), Down()).price_token_usd(nat, 1)


# -- priced records --------------------------------------------------------

def findings(block, arbs=(), liqs=()):
    return MevFindings(block, 1_600_000_000, tuple(arbs), (), tuple(liqs))


def test_arbitrage_usd_is_profit_times_price():
    b = ChainBuilder(chain_id=137)
    usdc, wm = b.token("USDC", 6, 1), b.token("WNATIVE", 18, "0.8")
    other = b.token("OTHER", 18, 1)
    f = b.factory("q", "v2")
    b.v2_pool(f, usdc, wm)
    p1, p2 = b.v2_pool(f, wm, other), b.v2_pool(f, other, wm, depth_usd=5)
    arb = make_arbitrage([swap(p1, wm, other, 10 * 10 ** 18, 8 * 10 ** 18, 0, tx="0x1"),
                          swap(p2, other, wm, 8 * 10 ** 18, 13 * 10 ** 18, 1, tx="0x1")])
    (rec,) = price_findings(findings(3, [arb]), b.config(), PriceOracle(b.config(), b.chain))
    assert rec.profit_raw == 3 * 10 ** 18
    assert rec.usd_profit == Decimal("2.400000")
    assert rec.path_length == 2 and rec.route == DIRECT_USDC


def test_unpoolable_profit_token_is_kept_unpriced():
    b, usdc, nat, tok, lone = small_chain()
    arb = make_arbitrage([swap("0x" + "1" * 40, lone, tok, 5, 5, 0), swap("0x" + "2" * 40, tok, lone, 5, 9, 1)])
    (rec,) = price_findings(findings(3, [arb]), b.config(), PriceOracle(b.config(), b.chain))
    assert rec.usd_profit is None and rec.route == UNPRICED and rec.profit_raw == 4


def test_liquidation_value_is_seized_minus_repaid():
    b = ChainBuilder(chain_id=1)
    usdc, nat = b.token("USDC", 6, 1), b.token("WNATIVE", 18, 1)
    c, d = b.token("C", 18, 2), b.token("D", 8, 1)
    f = b.factory("v2", "v2")
    b.v2_pool(f, c, usdc)
    b.v2_pool(f, d, usdc)
    liq = LiquidationEvent("0x5", 4, 0, "aave", "0x" + "a" * 40, "0x" + "b" * 40, d, 150 * 10 ** 8, c,
                           100 * 10 ** 18)
    (rec,) = price_findings(findings(4, liqs=[liq]), b.config(), PriceOracle(b.config(), b.chain))
    expected = Fraction(100) * 2 - Fraction(150) * 1
    assert expected == 50
    assert rec.usd_profit == Decimal("50.000000")
    assert rec.kind == "liquidation" and rec.profit_token == c


def test_ordinals_per_transaction():
    b, usdc, nat, tok, _ = small_chain()
    liqs = [LiquidationEvent("0x7", 2, i, "aave", "0x" + "a" * 40, "0x" + "b" * 40, usdc, 1, nat, 1, 3)
            for i in range(3)]
    recs = price_findings(findings(2, liqs=liqs), b.config(), PriceOracle(b.config(), b.chain))
    assert [r.ordinal for r in recs] == [0, 1, 2]
