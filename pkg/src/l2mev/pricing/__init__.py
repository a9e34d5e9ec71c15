from .ammmath import Q96, Q192, spot_price_v2, spot_price_v3, to_decimal, v2_ratio, v3_ratio
from .quotes import DIRECT_USDC, UNPRICED, VIA_NATIVE, PoolRef, PriceOracle, TokenPrice, find_usdc_pool, \
    price_token_usd
from .records import ARBITRAGE, KINDS, LIQUIDATION, SANDWICH, PricedMevRecord, price_findings, quantize_usd, utc_day

__all__ = [
    "ARBITRAGE", "DIRECT_USDC", "KINDS", "LIQUIDATION", "PoolRef", "PriceOracle", "PricedMevRecord", "Q192",
    "Q96", "SANDWICH", "TokenPrice", "UNPRICED", "VIA_NATIVE", "find_usdc_pool", "price_findings",
    "price_token_usd", "quantize_usd", "spot_price_v2", "spot_price_v3", "to_decimal", "utc_day", "v2_ratio",
    "v3_ratio",
]
