"""USD valuation of MEV findings."""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal
from fractions import Fraction
from typing import Any, Optional, Tuple

from ..detector.inspect import MevFindings
from .quotes import DIRECT_USDC, UNPRICED, VIA_NATIVE, PriceOracle

ARBITRAGE = "arbitrage"
SANDWICH = "sandwich"
LIQUIDATION = "liquidation"
KINDS = (ARBITRAGE, SANDWICH, LIQUIDATION)

USD_PLACES = 6


def utc_day(timestamp: int) -> str:
    return datetime.fromtimestamp(timestamp, tz=timezone.utc).date().isoformat()


def quantize_usd(value: Fraction) -> Decimal:
    """Round an exact value to 6 fractional digits, half-even."""
    return Decimal(round(value * 10 ** USD_PLACES)).scaleb(-USD_PLACES)


@dataclass(frozen=True)
class PricedMevRecord:
    block_number: int
    timestamp: int
    tx_hash: str
    tx_index: int
    ordinal: int
    kind: str
    profit_token: str
    profit_raw: int
    usd_profit: Optional[Decimal]
    route: str
    path_length: int
    swaps: Tuple[tuple, ...] = ()
    finding: Any = field(default=None, compare=False, repr=False)

    @property
    def day(self) -> str:
        return utc_day(self.timestamp)

    @property
    def priced(self) -> bool:
        return self.usd_profit is not None

    @property
    def usd_or_zero(self) -> Decimal:
        return self.usd_profit if self.usd_profit is not None else Decimal(0)


def _combine_routes(*routes: str) -> str:
    if UNPRICED in routes:
        return UNPRICED
    if VIA_NATIVE in routes:
        return VIA_NATIVE
    return DIRECT_USDC


def _token_value(oracle: PriceOracle, token: str, raw: int, block: int):
    price = oracle.price_token_usd(token, block)
    decimals = oracle.decimals(token)
    if not price.priced or decimals is None:
        return None, UNPRICED
    return Fraction(raw) * price.usd_price / 10 ** decimals, price.route


def price_findings(findings: MevFindings, cfg, oracle: PriceOracle) -> list:
    """One record per finding, valued at the finding's own block.

    Records are ordered by (tx index, first log index) and numbered per
    transaction. Unpriced findings are kept with ``usd_profit=None``.
    """
    block = findings.block_number
    drafts = []
    for arb in findings.arbitrages:
        value, route = _token_value(oracle, arb.profit_token, arb.profit_raw, block)
        drafts.append((arb.tx_index, arb.path[0].log_index, arb.tx_hash, ARBITRAGE, arb.profit_token,
                       arb.profit_raw, value, route, len(arb.path), tuple(s.key for s in arb.path), arb))
    for sw in findings.sandwiches:
        value, route = _token_value(oracle, sw.profit_token, sw.profit_raw, block)
        drafts.append((sw.tx_index, sw.backrun.log_index, sw.tx_hash, SANDWICH, sw.profit_token,
                       sw.profit_raw, value, route, 2 + len(sw.victims), tuple(sw.swap_keys), sw))
    for liq in findings.liquidations:
        seized, r1 = _token_value(oracle, liq.collateral_token, liq.collateral_seized, block)
        repaid, r2 = _token_value(oracle, liq.debt_token, liq.debt_repaid, block)
        value = None if seized is None or repaid is None else seized - repaid
        drafts.append((liq.tx_index, liq.log_index, liq.tx_hash, LIQUIDATION, liq.collateral_token,
                       liq.collateral_seized, value, _combine_routes(r1, r2), 0, (liq.key,), liq))
    drafts.sort(key=lambda d: (d[0], d[1]))
    records, ordinals = [], {}
    for tx_index, _, tx_hash, kind, token, raw, value, route, length, keys, finding in drafts:
        ordinal = ordinals.get(tx_hash, 0)
        ordinals[tx_hash] = ordinal + 1
        records.append(PricedMevRecord(
            block_number=block,
            timestamp=findings.timestamp,
            tx_hash=tx_hash,
            tx_index=tx_index,
            ordinal=ordinal,
            kind=kind,
            profit_token=token,
            profit_raw=raw,
            usd_profit=None if value is None else quantize_usd(value),
            route=route,
            path_length=length,
            swaps=keys,
            finding=finding,
        ))
    return records
