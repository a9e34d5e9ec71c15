"""Log-based MEV detection for EVM rollups (arbitrage, sandwich, liquidation)."""
from .analytics import AggregateReport, Histogram, StatsRow, TokenFrequencyRow, aggregate, build_report, histogram, \
    top_tokens, write_report
from .decoder import LiquidationEvent, SwapEvent, build_registry, classify_block
from .detector import Arbitrage, MevFindings, Sandwich, detect_arbitrages, detect_sandwiches, inspect_block
from .estimators import LogClassifier, MevDetector, ProfitAggregator, UsdPricer, make_inspector
from .ingestion import BlockData, ChainConfig, LogRecord, TransactionRecord, load_config, load_fixture, \
    record_fixture, stream_blocks
from .pipeline import run_inspection
from .pricing import PricedMevRecord, PriceOracle, TokenPrice, price_token_usd, spot_price_v2, spot_price_v3
from .storage import MevStore, export, query_range

__version__ = "0.1.0"

__all__ = [
    "AggregateReport", "Arbitrage", "BlockData", "ChainConfig", "Histogram", "LiquidationEvent", "LogClassifier",
    "LogRecord", "MevDetector", "MevFindings", "MevStore", "PriceOracle", "PricedMevRecord", "ProfitAggregator",
    "Sandwich", "StatsRow", "SwapEvent", "TokenFrequencyRow", "TokenPrice", "TransactionRecord", "UsdPricer",
    "aggregate", "build_registry", "build_report", "classify_block", "detect_arbitrages", "detect_sandwiches",
    "export", "histogram", "inspect_block", "load_config", "load_fixture", "make_inspector", "price_token_usd",
    "query_range", "record_fixture", "run_inspection", "spot_price_v2", "spot_price_v3", "stream_blocks",
    "top_tokens", "write_report",
]
