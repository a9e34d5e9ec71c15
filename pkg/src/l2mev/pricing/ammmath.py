"""Exact spot prices from V2 reserves and V3 sqrtPriceX96."""
from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Optional

Q96 = 1 << 96
Q192 = 1 << 192
DECIMAL_PRECISION = 50


def to_decimal(value: Fraction, precision: int = DECIMAL_PRECISION) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = precision
        return Decimal(value.numerator) / Decimal(value.denominator)


def v2_ratio(reserve0: int, reserve1: int, decimals0: int, decimals1: int) -> Optional[Fraction]:
    """Human price of token1 in token0 units, exact; ``None`` for a drained pool."""
    if reserve0 <= 0 or reserve1 <= 0:
        return None
    return Fraction(reserve0 * 10 ** decimals1, reserve1 * 10 ** decimals0)


def v3_ratio(sqrt_price_x96: int, decimals0: int, decimals1: int) -> Optional[Fraction]:
    """Human price of token1 in token0 units from ``slot0().sqrtPriceX96``.

    The raw token0 price in token1 is ``sqrtP**2 / 2**192``; token1 in token0
    is its inverse rescaled by ``10**(decimals1 - decimals0)``.
    """
    if sqrt_price_x96 <= 0:
        return None
    return Fraction(Q192 * 10 ** decimals1, sqrt_price_x96 * sqrt_price_x96 * 10 ** decimals0)


def spot_price_v2(reserve0: int, reserve1: int, decimals0: int, decimals1: int) -> Optional[Decimal]:
    ratio = v2_ratio(reserve0, reserve1, decimals0, decimals1)
    return None if ratio is None else to_decimal(ratio)


def spot_price_v3(sqrt_price_x96: int, decimals0: int, decimals1: int) -> Optional[Decimal]:
    ratio = v3_ratio(sqrt_price_x96, decimals0, decimals1)
    return None if ratio is None else to_decimal(ratio)
