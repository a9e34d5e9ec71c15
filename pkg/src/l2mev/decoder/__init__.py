from ..ingestion.metadata import PoolMetadata
from .classify import ClassifiedBlock, Diagnostics, TxEvents, classify_block
from .events import (
    DecodeError,
    InvalidEvent,
    LiquidationEvent,
    MalformedSwap,
    SwapEvent,
    decode_liquidation,
    decode_v2_swap,
    decode_v3_swap,
)
from .registry import EventRegistry, RegistryEntry, RegistryError, build_registry, read_registry_file, \
    topic_for_signature

__all__ = [
    "ClassifiedBlock", "DecodeError", "Diagnostics", "EventRegistry", "InvalidEvent", "LiquidationEvent",
    "MalformedSwap", "PoolMetadata", "RegistryEntry", "RegistryError", "SwapEvent", "TxEvents",
    "build_registry", "classify_block", "decode_liquidation", "decode_v2_swap", "decode_v3_swap",
    "read_registry_file", "topic_for_signature",
]
