from .arbitrage import Arbitrage, detect_arbitrages, make_arbitrage
from .inspect import MevFindings, extract_liquidations, inspect_block
from .sandwich import Sandwich, detect_sandwiches

__all__ = [
    "Arbitrage", "MevFindings", "Sandwich", "detect_arbitrages", "detect_sandwiches",
    "extract_liquidations", "inspect_block", "make_arbitrage",
]
