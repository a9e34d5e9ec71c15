"""Block-pinned USD prices from on-chain DEX pools."""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from ..abi import ZERO_ADDRESS, encode_address, encode_call, encode_uint, word_address, word_uint, words
from ..ingestion.config import ChainConfig, DexFactory
from ..ingestion.metadata import TokenDecimals
from .ammmath import v2_ratio, v3_ratio

DIRECT_USDC = "direct_usdc"
VIA_NATIVE = "via_native"
UNPRICED = "unpriced"


@dataclass(frozen=True)
class PoolRef:
    address: str
    family: str
    factory: str
    token0: str
    token1: str
    fee_tier: Optional[int] = None


@dataclass(frozen=True)
class TokenPrice:
    token: str
    block_number: int
    usd_price: Optional[Fraction]
    route: str
    source_pools: Tuple[str, ...] = ()

    def __post_init__(self):
        if (self.route == UNPRICED) != (self.usd_price is None):
            raise ValueError("route is unpriced exactly when the price is absent")
        if self.usd_price is not None and self.usd_price < 0:
            raise ValueError("usd_price must be non-negative")
        if len(self.source_pools) > 2:
            raise ValueError("at most two source pools")

    @property
    def priced(self) -> bool:
        return self.usd_price is not None


def _first_word(data: Optional[bytes], index: int = 0) -> Optional[int]:
    if not data or len(data) < 32 * (index + 1):
        return None
    return word_uint(words(data[: 32 * (index + 1)])[index])


class PriceOracle:
    """Prices tokens in USDC at a given block.

    Factories are consulted in configuration order and the first one holding
    a pool wins; within a V3 factory the fee tier with the largest in-range
    liquidity is used (ties to the lowest fee). Pool addresses found by a
    factory are memoised per (token, quote, factory, fee) and reused for
    blocks at or after the one where they were first seen.
    """

    def __init__(self, cfg: ChainConfig, state, native_hop: Optional[bool] = None,
                 decimals: Optional[TokenDecimals] = None):
        self.cfg = cfg
        self.state = state
        self.native_hop = cfg.native_hop if native_hop is None else native_hop
        self.decimals = decimals or TokenDecimals(state)
        self._pools: dict = {}
        self._prices: dict = {}
        self._lock = threading.Lock()

    # -- pool discovery -------------------------------------------------
    def _factory_lookup(self, factory: DexFactory, token: str, quote: str, fee: Optional[int],
                        block: int) -> Optional[str]:
        key = (token, quote, factory.address, fee)
        with self._lock:
            hit = self._pools.get(key)
        if hit is not None and block >= hit[1]:
            return hit[0]
        if factory.family == "v2":
            data = encode_call("getPair(address,address)", encode_address(token), encode_address(quote))
        else:
            data = encode_call("getPool(address,address,uint24)", encode_address(token), encode_address(quote),
                               encode_uint(fee))
        out = self.state.call(factory.address, data, block)
        if not out or len(out) < 32:
            return None
        pool = word_address(out[:32])
        if pool == ZERO_ADDRESS:
            return None
        with self._lock:
            prev = self._pools.get(key)
            if prev is None or block < prev[1]:
                self._pools[key] = (pool, block)
        return pool

    def find_pool(self, token: str, quote: str, block: int) -> Optional[PoolRef]:
        if token == quote:
            return None
        token0, token1 = sorted((token, quote))
        for factory in self.cfg.dex_factories:
            if factory.family == "v2":
                pool = self._factory_lookup(factory, token, quote, None, block)
                if pool:
                    return PoolRef(pool, "v2", factory.address, token0, token1)
                continue
            best = None
            for fee in sorted(factory.fee_tiers):
                pool = self._factory_lookup(factory, token, quote, fee, block)
                if not pool:
                    continue
                liquidity = _first_word(self.state.call(pool, encode_call("liquidity()"), block)) or 0
                if liquidity > 0 and (best is None or liquidity > best[0]):
                    best = (liquidity, pool, fee)
            if best is not None:
                return PoolRef(best[1], "v3", factory.address, token0, token1, best[2])
        return None

    def find_usdc_pool(self, token: str, block: int) -> Optional[PoolRef]:
        return self.find_pool(token, self.cfg.usdc_token, block)

    # -- prices ---------------------------------------------------------
    def pool_price(self, pool: PoolRef, token: str, block: int) -> Optional[Fraction]:
        """Human price of ``token`` in the pool's other token at ``block``."""
        d0, d1 = self.decimals(pool.token0), self.decimals(pool.token1)
        if d0 is None or d1 is None:
            return None
        if pool.family == "v2":
            out = self.state.call(pool.address, encode_call("getReserves()"), block)
            r0, r1 = _first_word(out, 0), _first_word(out, 1)
            if r0 is None or r1 is None:
                return None
            ratio = v2_ratio(r0, r1, d0, d1)
        else:
            sqrt_price = _first_word(self.state.call(pool.address, encode_call("slot0()"), block))
            if sqrt_price is None:
                return None
            ratio = v3_ratio(sqrt_price, d0, d1)
        if ratio is None:
            return None
        # ratio is token1 quoted in token0
        return ratio if token == pool.token1 else 1 / ratio

    def _quote(self, token: str, quote: str, block: int):
        pool = self.find_pool(token, quote, block)
        if pool is None:
            return None, None
        return self.pool_price(pool, token, block), pool

    def price_token_usd(self, token: str, block: int) -> TokenPrice:
        key = (token, block)
        with self._lock:
            cached = self._prices.get(key)
        if cached is not None:
            return cached
        price = self._price(token, block)
        with self._lock:
            self._prices.setdefault(key, price)
        return price

    def _price(self, token: str, block: int) -> TokenPrice:
        usdc, native = self.cfg.usdc_token, self.cfg.native_wrapped_token
        if token == usdc:
            return TokenPrice(token, block, Fraction(1), DIRECT_USDC)
        direct, pool = self._quote(token, usdc, block)
        if direct is not None:
            return TokenPrice(token, block, direct, DIRECT_USDC, (pool.address,))
        if self.native_hop and token != native:
            in_native, pool_tn = self._quote(token, native, block)
            if in_native is not None:
                native_usd, pool_nu = self._quote(native, usdc, block)
                if native_usd is not None:
                    return TokenPrice(token, block, in_native * native_usd, VIA_NATIVE,
                                      (pool_tn.address, pool_nu.address))
        return TokenPrice(token, block, None, UNPRICED)


def find_usdc_pool(cfg: ChainConfig, token: str, block: int, oracle: PriceOracle) -> Optional[PoolRef]:
    return oracle.find_usdc_pool(token, block)


def price_token_usd(cfg: ChainConfig, token: str, block: int, oracle: PriceOracle) -> TokenPrice:
    return oracle.price_token_usd(token, block)
