"""Simulated chain state and planted MEV corpora for offline runs and tests.

:class:`SimulatedChain` answers the contract reads the pipeline makes
(ERC-20 ``decimals``, pair/pool ``token0``/``token1``/``fee``/``getReserves``/
``slot0``/``liquidity`` and factory ``getPair``/``getPool``) from an in-memory
model. :class:`ChainBuilder` assembles blocks with correctly encoded event
logs, and :func:`generate_corpus` plants arbitrages, sandwiches and
liquidations among decoys, returning the ground-truth manifest.
"""
from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .abi import (
    ZERO_ADDRESS,
    address_topic,
    encode_address,
    encode_int,
    encode_uint,
    keccak256,
    selector,
    word_address,
    word_uint,
)
from .decoder.registry import topic_for_signature
from .ingestion.config import ChainConfig, DexFactory
from .ingestion.model import REVERTED, SUCCESS, BlockData, LogRecord, TransactionRecord

V2_SWAP = topic_for_signature("Swap(address,uint256,uint256,uint256,uint256,address)")
V3_SWAP = topic_for_signature("Swap(address,address,int256,int256,uint160,uint128,int24)")
AAVE_LIQUIDATION = topic_for_signature("LiquidationCall(address,address,address,uint256,uint256,address,bool)")
COMPOUND_LIQUIDATION = topic_for_signature("LiquidateBorrow(address,address,uint256,address,uint256)")
TRANSFER = topic_for_signature("Transfer(address,address,uint256)")
SYNC = topic_for_signature("Sync(uint112,uint112)")

_SEL = {name: selector(name) for name in (
    "decimals()", "token0()", "token1()", "fee()", "getReserves()", "slot0()", "liquidity()",
    "getPair(address,address)", "getPool(address,address,uint24)",
)}
_BY_SELECTOR = {v: k for k, v in _SEL.items()}


def derive_address(*parts) -> str:
    return "0x" + keccak256(":".join(str(p) for p in parts).encode())[-20:].hex()


def sqrt_price_x96(price_token1_in_token0: Fraction, decimals0: int, decimals1: int) -> int:
    """Inverse of the spot formula: sqrtPriceX96 for a human price of token1 in token0."""
    raw_token0_in_token1 = (1 / Fraction(price_token1_in_token0)) * Fraction(10 ** decimals1, 10 ** decimals0)
    return math.isqrt(raw_token0_in_token1.numerator * (1 << 192) // raw_token0_in_token1.denominator)


class _Schedule:
    """Piecewise-constant value over block numbers."""

    def __init__(self, value):
        self.blocks = [-1]
        self.values = [value]

    def set(self, from_block: int, value):
        i = bisect.bisect_left(self.blocks, from_block)
        if i < len(self.blocks) and self.blocks[i] == from_block:
            self.values[i] = value
        else:
            self.blocks.insert(i, from_block)
            self.values.insert(i, value)

    def at(self, block: Optional[int]):
        if block is None:
            return self.values[-1]
        return self.values[bisect.bisect_right(self.blocks, block) - 1]


@dataclass
class _Pool:
    address: str
    family: str
    token0: str
    token1: str
    fee: Optional[int]
    state: _Schedule  # v2: (r0, r1); v3: (sqrtPriceX96, liquidity)
    created: int = 0


class SimulatedChain:
    """In-memory contract state answering ``call(to, data, block)``."""

    def __init__(self):
        self.decimals: dict = {}
        self.pools: dict = {}
        self.factories: dict = {}  # address -> {"family", "pairs": {key: pool}}
        self.calls = 0

    def add_token(self, address: str, decimals: int):
        self.decimals[address] = decimals

    def add_factory(self, address: str, family: str):
        self.factories[address] = {"family": family, "pairs": {}}

    def add_pool(self, factory: str, family: str, token_a: str, token_b: str, state, fee: Optional[int] = None,
                 created: int = 0, address: Optional[str] = None) -> str:
        token0, token1 = sorted((token_a, token_b))
        address = address or derive_address("pool", factory, token0, token1, fee)
        self.pools[address] = _Pool(address, family, token0, token1, fee, _Schedule(state), created)
        if factory is not None:
            self.factories[factory]["pairs"][(token0, token1, fee)] = address
        return address

    def set_state(self, pool: str, from_block: int, state):
        self.pools[pool].state.set(from_block, state)

    def call(self, to: str, data: bytes, block: Optional[int]) -> Optional[bytes]:
        self.calls += 1
        name = _BY_SELECTOR.get(data[:4])
        if name is None:
            return None
        if name == "decimals()":
            d = self.decimals.get(to)
            return None if d is None else encode_uint(d)
        if to in self.factories:
            return self._factory_call(to, name, data[4:], block)
        pool = self.pools.get(to)
        if pool is None or (block is not None and block < pool.created):
            return None
        if name == "token0()":
            return encode_address(pool.token0)
        if name == "token1()":
            return encode_address(pool.token1)
        if name == "fee()" and pool.family == "v3":
            return encode_uint(pool.fee)
        state = pool.state.at(block)
        if name == "getReserves()" and pool.family == "v2":
            return encode_uint(state[0]) + encode_uint(state[1]) + encode_uint(0)
        if name == "slot0()" and pool.family == "v3":
            return encode_uint(state[0]) + bytes(32 * 6)
        if name == "liquidity()" and pool.family == "v3":
            return encode_uint(state[1])
        return None

    def _factory_call(self, factory, name, args, block):
        info = self.factories[factory]
        a, b = word_address(args[0:32]), word_address(args[32:64])
        token0, token1 = sorted((a, b))
        if name == "getPair(address,address)" and info["family"] == "v2":
            key = (token0, token1, None)
        elif name == "getPool(address,address,uint24)" and info["family"] == "v3":
            key = (token0, token1, word_uint(args[64:96]))
        else:
            return None
        pool = info["pairs"].get(key)
        if pool is None or (block is not None and block < self.pools[pool].created):
            return encode_address(ZERO_ADDRESS)
        return encode_address(pool)


@dataclass
class BlockDraft:
    builder: "ChainBuilder"
    number: int
    timestamp: int
    txs: list = field(default_factory=list)
    next_log: int = 0

    def add_tx(self, sender: str, events=(), reverted: bool = False, to: Optional[str] = None) -> tuple:
        """Append a transaction; returns ``(tx_hash, [log_index per event])``."""
        index = len(self.txs)
        tx_hash = "0x" + keccak256(f"tx:{self.builder.chain_id}:{self.number}:{index}".encode()).hex()
        logs, indices = [], []
        if not reverted:
            for address, topics, data in events:
                logs.append(LogRecord(address, tuple(topics), data, self.next_log))
                indices.append(self.next_log)
                self.next_log += 1
        self.txs.append(TransactionRecord(
            hash=tx_hash, index=index, sender=sender, recipient=to or derive_address("router", sender),
            gas_used=21000 + 60000 * len(events), status=REVERTED if reverted else SUCCESS, logs=tuple(logs),
        ))
        return tx_hash, indices

    def finish(self) -> BlockData:
        block = BlockData(self.number, self.timestamp, tuple(self.txs))
        self.builder.blocks.append(block)
        return block


class ChainBuilder:
    """Builds a simulated chain (tokens, pools, factories) and blocks of encoded logs."""

    def __init__(self, chain_id: int = 137, genesis_ts: int = 1_623_888_000, block_time: int = 2,
                 sandwiches_possible: bool = True, name: str = "synthetic"):
        self.chain_id = chain_id
        self.genesis_ts = genesis_ts
        self.block_time = block_time
        self.sandwiches_possible = sandwiches_possible
        self.name = name
        self.chain = SimulatedChain()
        self.tokens: dict = {}
        self.usd: dict = {}
        self.factories: list = []
        self.pools_by_pair: dict = {}
        self.blocks: list = []

    # -- state ----------------------------------------------------------
    def token(self, name: str, decimals: int, usd_price=None) -> str:
        addr = derive_address("token", self.chain_id, name)
        self.tokens[name] = addr
        self.chain.add_token(addr, decimals)
        if usd_price is not None:
            self.usd[addr] = Fraction(str(usd_price))
        return addr

    def factory(self, name: str, family: str, fee_tiers=()) -> str:
        addr = derive_address("factory", self.chain_id, name)
        self.chain.add_factory(addr, family)
        self.factories.append(DexFactory(addr, family, tuple(fee_tiers)))
        return addr

    def _dec(self, token):
        return self.chain.decimals[token]

    def v2_reserves(self, token_a, token_b, depth_usd, price_a=None, price_b=None) -> tuple:
        """Raw (reserve0, reserve1) holding ``depth_usd`` of value on each side."""
        pa = Fraction(price_a) if price_a is not None else self.usd[token_a]
        pb = Fraction(price_b) if price_b is not None else self.usd[token_b]
        ra = int(Fraction(depth_usd) / pa * 10 ** self._dec(token_a))
        rb = int(Fraction(depth_usd) / pb * 10 ** self._dec(token_b))
        return (ra, rb) if token_a < token_b else (rb, ra)

    def v2_pool(self, factory: str, token_a: str, token_b: str, depth_usd=1_000_000, reserves=None,
                created: int = 0) -> str:
        state = reserves or self.v2_reserves(token_a, token_b, depth_usd)
        pool = self.chain.add_pool(factory, "v2", token_a, token_b, state, created=created)
        self.pools_by_pair.setdefault(frozenset((token_a, token_b)), []).append(pool)
        return pool

    def v3_pool(self, factory: str, token_a: str, token_b: str, fee: int, liquidity: int, price_b_in_a=None,
                created: int = 0) -> str:
        token0, token1 = sorted((token_a, token_b))
        if price_b_in_a is None:
            price1_in_0 = self.usd[token1] / self.usd[token0]
        else:
            price_b_in_a = Fraction(price_b_in_a)
            price1_in_0 = price_b_in_a if token1 == token_b else 1 / price_b_in_a
        sp = sqrt_price_x96(price1_in_0, self._dec(token0), self._dec(token1))
        pool = self.chain.add_pool(factory, "v3", token_a, token_b, (sp, liquidity), fee=fee, created=created)
        self.pools_by_pair.setdefault(frozenset((token_a, token_b)), []).append(pool)
        return pool

    def config(self, **overrides) -> ChainConfig:
        values = dict(
            chain_id=self.chain_id,
            rpc_endpoint="",
            native_wrapped_token=self.tokens["WNATIVE"],
            usdc_token=self.tokens["USDC"],
            dex_factories=tuple(self.factories),
            sandwiches_possible=self.sandwiches_possible,
            name=self.name,
            token_labels={a: n for n, a in self.tokens.items()},
        )
        values.update(overrides)
        return ChainConfig(**values)

    # -- blocks ---------------------------------------------------------
    def block(self, number: Optional[int] = None) -> BlockDraft:
        if number is None:
            number = self.blocks[-1].number + 1 if self.blocks else 1
        return BlockDraft(self, number, self.genesis_ts + number * self.block_time)

    # -- events ---------------------------------------------------------
    def swap_event(self, pool: str, token_in: str, amount_in: int, amount_out: int, sender: str,
                   recipient: Optional[str] = None) -> tuple:
        p = self.chain.pools[pool]
        recipient = recipient or sender
        topics_v = address_topic(sender), address_topic(recipient)
        zero_in = token_in == p.token0
        if p.family == "v2":
            a0_in, a1_in = (amount_in, 0) if zero_in else (0, amount_in)
            a0_out, a1_out = (0, amount_out) if zero_in else (amount_out, 0)
            data = b"".join(encode_uint(v) for v in (a0_in, a1_in, a0_out, a1_out))
            return pool, (V2_SWAP, *topics_v), data
        a0, a1 = (amount_in, -amount_out) if zero_in else (-amount_out, amount_in)
        sp, liq = p.state.values[-1]
        data = encode_int(a0) + encode_int(a1) + encode_uint(sp) + encode_uint(liq) + encode_int(0)
        return pool, (V3_SWAP, *topics_v), data

    def raw_v2_swap_event(self, pool: str, amounts: tuple, sender: str) -> tuple:
        data = b"".join(encode_uint(v) for v in amounts)
        return pool, (V2_SWAP, address_topic(sender), address_topic(sender)), data

    def transfer_event(self, token: str, src: str, dst: str, amount: int) -> tuple:
        return token, (TRANSFER, address_topic(src), address_topic(dst)), encode_uint(amount)

    def aave_liquidation_event(self, lending_pool: str, collateral: str, debt: str, borrower: str,
                               debt_to_cover: int, collateral_amount: int, liquidator: str) -> tuple:
        topics = (AAVE_LIQUIDATION, address_topic(collateral), address_topic(debt), address_topic(borrower))
        data = encode_uint(debt_to_cover) + encode_uint(collateral_amount) + encode_address(liquidator) \
            + encode_uint(0)
        return lending_pool, topics, data

    def compound_liquidation_event(self, c_token_debt: str, liquidator: str, borrower: str, repay: int,
                                   c_token_collateral: str, seize: int) -> tuple:
        data = encode_address(liquidator) + encode_address(borrower) + encode_uint(repay) \
            + encode_address(c_token_collateral) + encode_uint(seize)
        return c_token_debt, (COMPOUND_LIQUIDATION,), data

    def fair_out(self, token_in: str, token_out: str, amount_in: int, edge=Fraction(0)) -> int:
        """Output amount at USD parity, scaled by ``1 + edge``."""
        value = Fraction(amount_in, 10 ** self._dec(token_in)) * self.usd[token_in]
        out = value / self.usd[token_out] * 10 ** self._dec(token_out) * (1 + Fraction(edge))
        return max(int(out), 1)


def standard_builder(chain_id: int = 137, block_time: int = 2, genesis_ts: int = 1_623_888_000,
                     sandwiches_possible: bool = True) -> ChainBuilder:
    """Tokens, two V2 factories and one V3 factory with a realistic pool graph.

    ``NATIVEONLY`` trades only against the wrapped native token (priced via
    the native hop); ``ORPHAN`` has no USDC or native pool (unpriced).
    """
    b = ChainBuilder(chain_id, genesis_ts, block_time, sandwiches_possible)
    t = {}
    for name, dec, usd in (
        ("USDC", 6, 1), ("WNATIVE", 18, "0.8"), ("WETH", 18, 2000), ("WBTC", 8, 30000), ("DAI", 18, 1),
        ("QUICK", 18, 50), ("NATIVEONLY", 18, "0.02"), ("ORPHAN", 18, 3), ("IRON", 18, 10),
    ):
        t[name] = b.token(name, dec, usd)
    fa = b.factory("dexA", "v2")
    fb = b.factory("dexB", "v2")
    fc = b.factory("dexC", "v3", (500, 3000))
    for x, y in (("USDC", "WNATIVE"), ("USDC", "WETH"), ("WETH", "WNATIVE"), ("USDC", "DAI"), ("WBTC", "USDC"),
                 ("WBTC", "WETH"), ("QUICK", "USDC"), ("QUICK", "WNATIVE"), ("NATIVEONLY", "WNATIVE"),
                 ("ORPHAN", "WETH"), ("IRON", "USDC")):
        b.v2_pool(fa, t[x], t[y])
    for x, y in (("USDC", "WNATIVE"), ("USDC", "WETH"), ("WETH", "WNATIVE"), ("USDC", "DAI"), ("WBTC", "WETH"),
                 ("QUICK", "WNATIVE"), ("NATIVEONLY", "WNATIVE"), ("ORPHAN", "WETH"), ("IRON", "USDC")):
        b.v2_pool(fb, t[x], t[y], depth_usd=400_000)
    b.v3_pool(fc, t["USDC"], t["WETH"], 500, liquidity=5 * 10 ** 18)
    b.v3_pool(fc, t["USDC"], t["WETH"], 3000, liquidity=10 ** 17)
    b.v3_pool(fc, t["WETH"], t["WNATIVE"], 3000, liquidity=10 ** 20)
    return b


@dataclass
class PlantedCorpus:
    builder: ChainBuilder
    blocks: list
    manifest: list

    @property
    def chain(self) -> SimulatedChain:
        return self.builder.chain

    @property
    def config(self) -> ChainConfig:
        return self.builder.config()

    def counts(self) -> dict:
        out: dict = {}
        for m in self.manifest:
            out[m["kind"]] = out.get(m["kind"], 0) + 1
        return out


_TRIANGLES = (("USDC", "WETH", "WNATIVE"), ("USDC", "WBTC", "WETH"), ("USDC", "QUICK", "WNATIVE"))
_PLANT_WEIGHTS = (
    ("arb2", 26), ("arb3", 12), ("sandwich", 7), ("liq_aave", 3), ("liq_compound", 2), ("precedence", 2),
    ("single", 18), ("open_path", 8), ("round_trip", 6), ("reverted", 6), ("noise", 6), ("malformed", 2),
    ("unknown_pool", 2), ("near_sandwich", 4),
)


def generate_corpus(n_blocks: int = 50, seed: int = 7, *, start_block: int = 1, events_per_block: float = 3.0,
                    block_time: int = 3600, chain_id: int = 137, sandwiches_possible: bool = True,
                    empty_block_rate: float = 0.1) -> PlantedCorpus:
    """Blocks with planted MEV plus decoys, and the manifest of what must be found.

    Manifest entries: ``{"kind", "block", "tx_hash", "swaps": [[tx_hash, log_index], ...],
    "profit_token", "profit_raw"}``; liquidations list their single log under ``swaps``.
    """
    rng = random.Random(seed)
    b = standard_builder(chain_id, block_time, sandwiches_possible=sandwiches_possible)
    t = b.tokens
    kinds = [k for k, _ in _PLANT_WEIGHTS]
    weights = [w for _, w in _PLANT_WEIGHTS]
    manifest: list = []
    counter = [0]

    def actor(role):
        counter[0] += 1
        return derive_address(role, seed, counter[0])

    def pools_for(x, y):
        return b.pools_by_pair.get(frozenset((t[x], t[y])), [])

    def amount(token_name, usd_low=50, usd_high=20_000):
        token = t[token_name]
        usd = Fraction(rng.randint(usd_low * 100, usd_high * 100), 100)
        return max(int(usd / b.usd[token] * 10 ** b.chain.decimals[token]), 1)

    def legs_events(route, searcher, edge):
        """route: list of (pool, token_in, token_out); returns events and (token_in, amount_in, amount_out) legs."""
        events, legs = [], []
        first_token = route[0][1]
        amt = amount(_name(b, first_token))
        start = amt
        for i, (pool, tin, tout) in enumerate(route):
            out = b.fair_out(tin, tout, amt, Fraction(rng.randint(-30, 30), 10_000))
            if i == len(route) - 1:
                out = max(int(start * (1 + edge)), 1)
            if rng.random() < 0.5:
                events.append(b.transfer_event(tin, searcher, pool, amt))
            events.append(b.swap_event(pool, tin, amt, out, searcher))
            legs.append((tin, amt, out))
            amt = out
        return events, legs

    for number in range(start_block, start_block + n_blocks):
        draft = b.block(number)
        n_events = 0 if rng.random() < empty_block_rate else max(0, int(rng.expovariate(1 / events_per_block)) + 1)
        for _ in range(n_events):
            kind = rng.choices(kinds, weights)[0]
            _plant(kind, rng, b, t, draft, manifest, actor, pools_for, amount, legs_events)
        draft.finish()
    return PlantedCorpus(b, list(b.blocks), manifest)


def _name(b, token):
    for n, a in b.tokens.items():
        if a == token:
            return n
    raise KeyError(token)


def _edge(rng):
    # mostly profitable, some break-even or losing (optimistic attempts)
    return Fraction(rng.choice([-5, 0, 3, 8, 15, 40, 120, 300]), 10_000)


def _plant(kind, rng, b, t, draft, manifest, actor, pools_for, amount, legs_events):
    if kind == "arb2":
        pair = rng.choice([("USDC", "WETH"), ("USDC", "WNATIVE"), ("WETH", "WNATIVE"), ("QUICK", "WNATIVE"),
                           ("NATIVEONLY", "WNATIVE"), ("ORPHAN", "WETH"), ("IRON", "USDC"), ("USDC", "DAI")])
        x, y = pair if rng.random() < 0.5 else pair[::-1]
        p1, p2 = rng.sample(pools_for(x, y), 2)
        searcher = actor("searcher")
        events, legs = legs_events([(p1, t[x], t[y]), (p2, t[y], t[x])], searcher, _edge(rng))
        _arb_manifest(draft, searcher, events, legs, manifest)
    elif kind == "arb3":
        tri = list(rng.choice(_TRIANGLES))
        rng.shuffle(tri)
        x, y, z = tri
        route = [(rng.choice(pools_for(x, y)), t[x], t[y]), (rng.choice(pools_for(y, z)), t[y], t[z]),
                 (rng.choice(pools_for(z, x)), t[z], t[x])]
        searcher = actor("searcher")
        events, legs = legs_events(route, searcher, _edge(rng))
        _arb_manifest(draft, searcher, events, legs, manifest)
    elif kind == "sandwich":
        pair = rng.choice([("WETH", "USDC"), ("WNATIVE", "USDC"), ("QUICK", "WNATIVE"), ("WETH", "WNATIVE")])
        x, y = pair if rng.random() < 0.5 else pair[::-1]
        pool = rng.choice(pools_for(x, y))
        attacker = actor("attacker")
        front_in = amount(x, 1_000, 50_000)
        front_out = b.fair_out(t[x], t[y], front_in, Fraction(-3, 1000))
        h_front, l_front = draft.add_tx(attacker, [b.swap_event(pool, t[x], front_in, front_out, attacker)])
        keys = [[h_front, l_front[0]]]
        for _ in range(rng.randint(1, 3)):
            victim = actor("victim")
            vin = amount(x)
            h, li = draft.add_tx(victim, [b.swap_event(pool, t[x], vin, b.fair_out(t[x], t[y], vin, Fraction(-2, 100)),
                                                       victim)])
            keys.append([h, li[0]])
        back_out = max(int(front_in * (1 + _edge(rng))), 1)
        h_back, l_back = draft.add_tx(attacker, [b.swap_event(pool, t[y], front_out, back_out, attacker)])
        keys.append([h_back, l_back[0]])
        manifest.append({"kind": "sandwich", "block": draft.number, "tx_hash": h_back, "swaps": keys,
                         "profit_token": t[x], "profit_raw": back_out - front_in})
    elif kind == "liq_aave":
        liquidator, borrower = actor("liquidator"), actor("borrower")
        debt = amount("USDC", 500, 50_000)
        collateral = b.fair_out(t["USDC"], t["WETH"], debt, Fraction(5, 100))
        lending_pool = derive_address("aave-pool", b.chain_id)
        events = [b.transfer_event(t["USDC"], liquidator, lending_pool, debt),
                  b.aave_liquidation_event(lending_pool, t["WETH"], t["USDC"], borrower, debt, collateral, liquidator)]
        h, li = draft.add_tx(liquidator, events)
        manifest.append({"kind": "liquidation", "block": draft.number, "tx_hash": h, "swaps": [[h, li[1]]],
                         "profit_token": t["WETH"], "profit_raw": collateral})
    elif kind == "liq_compound":
        liquidator, borrower = actor("liquidator"), actor("borrower")
        c_debt, c_coll = derive_address("cToken", "cUSDC"), derive_address("cToken", "cETH")
        repay, seize = amount("USDC", 500, 5_000), rng.randint(10 ** 8, 10 ** 11)
        h, li = draft.add_tx(liquidator, [b.compound_liquidation_event(c_debt, liquidator, borrower, repay, c_coll,
                                                                        seize)])
        manifest.append({"kind": "liquidation", "block": draft.number, "tx_hash": h, "swaps": [[h, li[0]]],
                         "profit_token": c_coll, "profit_raw": seize})
    elif kind == "precedence":
        # front-run + victim + a back-run whose own transaction closes a cycle: reported as arbitrage only
        x, y = "WETH", "USDC"
        pool_p, pool_q = rng.sample(pools_for(x, y), 2)
        attacker = actor("attacker")
        fin = amount(x, 1_000, 10_000)
        fout = b.fair_out(t[x], t[y], fin)
        draft.add_tx(attacker, [b.swap_event(pool_p, t[x], fin, fout, attacker)])
        victim = actor("victim")
        vin = amount(x)
        draft.add_tx(victim, [b.swap_event(pool_p, t[x], vin, b.fair_out(t[x], t[y], vin), victim)])
        back_out = b.fair_out(t[y], t[x], fout, Fraction(1, 100))
        final = max(int(fout * (1 + _edge(rng))), 1)
        events = [b.swap_event(pool_p, t[y], fout, back_out, attacker),
                  b.swap_event(pool_q, t[x], back_out, final, attacker)]
        h, li = draft.add_tx(attacker, events)
        manifest.append({"kind": "arbitrage", "block": draft.number, "tx_hash": h,
                         "swaps": [[h, i] for i in li], "profit_token": t[y], "profit_raw": final - fout})
    elif kind == "single":
        pair = rng.choice(list(b.pools_by_pair))
        x, y = list(pair) if rng.random() < 0.5 else list(pair)[::-1]
        user = actor("user")
        amt = amount(_name(b, x))
        draft.add_tx(user, [b.swap_event(rng.choice(b.pools_by_pair[pair]), x, amt, b.fair_out(x, y, amt), user)])
    elif kind == "open_path":
        user = actor("user")
        x, y, z = rng.choice(_TRIANGLES)
        a1 = amount(x)
        o1 = b.fair_out(t[x], t[y], a1)
        o2 = b.fair_out(t[y], t[z], o1)
        draft.add_tx(user, [b.swap_event(rng.choice(pools_for(x, y)), t[x], a1, o1, user),
                            b.swap_event(rng.choice(pools_for(y, z)), t[y], o1, o2, user)])
    elif kind == "round_trip":
        user = actor("user")
        pool = rng.choice(pools_for("USDC", "WETH"))
        a1 = amount("USDC")
        o1 = b.fair_out(t["USDC"], t["WETH"], a1)
        draft.add_tx(user, [b.swap_event(pool, t["USDC"], a1, o1, user),
                            b.swap_event(pool, t["WETH"], o1, b.fair_out(t["WETH"], t["USDC"], o1, Fraction(1, 100)),
                                         user)])
    elif kind == "reverted":
        draft.add_tx(actor("searcher"), [], reverted=True)
    elif kind == "noise":
        user = actor("user")
        draft.add_tx(user, [b.transfer_event(t["DAI"], user, actor("user"), 10 ** 18),
                            (t["DAI"], (SYNC,), encode_uint(1) + encode_uint(2))])
    elif kind == "malformed":
        user = actor("user")
        draft.add_tx(user, [b.raw_v2_swap_event(rng.choice(pools_for("USDC", "WETH")[:2]), (3, 4, 0, 9), user)])
    elif kind == "unknown_pool":
        user = actor("user")
        ghost = derive_address("ghost-pool", user)
        draft.add_tx(user, [(ghost, (V2_SWAP, address_topic(user), address_topic(user)),
                             b"".join(encode_uint(v) for v in (5, 0, 0, 7)))])
    elif kind == "near_sandwich":
        x, y = "WNATIVE", "USDC"
        pool = rng.choice(pools_for(x, y))
        a, v, c = actor("attacker"), actor("victim"), actor("attacker")
        fin = amount(x)
        fout = b.fair_out(t[x], t[y], fin)
        draft.add_tx(a, [b.swap_event(pool, t[x], fin, fout, a)])
        draft.add_tx(v, [b.swap_event(pool, t[x], fin, fout, v)])
        draft.add_tx(c, [b.swap_event(pool, t[y], fout, fin + 1, c)])
    else:  # pragma: no cover
        raise ValueError(kind)


def _arb_manifest(draft, searcher, events, legs, manifest):
    h, indices = draft.add_tx(searcher, events)
    swap_logs = [i for (addr, topics, _), i in zip(events, indices) if topics[0] in (V2_SWAP, V3_SWAP)]
    manifest.append({
        "kind": "arbitrage", "block": draft.number, "tx_hash": h,
        "swaps": [[h, i] for i in swap_logs],
        "profit_token": legs[0][0], "profit_raw": legs[-1][2] - legs[0][1],
    })


def record_corpus_fixture(corpus: PlantedCorpus, path, *, native_hop: Optional[bool] = None):
    """Write ``corpus`` as a replayable fixture, including every contract read a run makes."""
    from .ingestion.fixtures import RecordingStateReader, record_fixture
    from .pipeline import BlockInspector

    reader = RecordingStateReader(corpus.chain)
    inspector = BlockInspector(corpus.config, reader, native_hop=native_hop)
    for block in corpus.blocks:
        inspector(block)
    # prices for every token wherever pool state can change, so replay answers ad-hoc lookups
    if corpus.blocks:
        first = corpus.blocks[0].number
        changes = {b for pool in corpus.chain.pools.values() for b in pool.state.blocks if b >= first}
        for number in sorted({first} | changes):
            for token in corpus.builder.tokens.values():
                inspector.oracle.price_token_usd(token, number)
    return record_fixture(corpus.blocks, path, chain_id=corpus.builder.chain_id, calls=reader.calls)
