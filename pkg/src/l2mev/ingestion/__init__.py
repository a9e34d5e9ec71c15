from .config import ChainConfig, ConfigError, DexFactory, chain_config_from_dict, load_config
from .fetch import BlockFetchError, BlockNotFound, block_from_rpc, block_to_rpc, fetch_block, stream_blocks
from .fixtures import (
    Fixture,
    FixtureError,
    FixtureNode,
    FixtureVersionError,
    RecordedCalls,
    RecordingStateReader,
    load_fixture,
    read_fixture,
    record_fixture,
)
from .metadata import PoolMetadata, PoolMetadataResolver, TokenDecimals, resolve_pool_metadata
from .model import REVERTED, SUCCESS, BlockData, LogRecord, TransactionRecord
from .rpc import RpcClient, RpcError, RpcStateReader, RpcUnreachable

__all__ = [
    "BlockData", "BlockFetchError", "BlockNotFound", "ChainConfig", "ConfigError", "DexFactory",
    "Fixture", "FixtureError", "FixtureNode", "FixtureVersionError", "LogRecord", "PoolMetadata",
    "PoolMetadataResolver", "REVERTED", "RecordedCalls", "RecordingStateReader", "RpcClient",
    "RpcError", "RpcStateReader", "RpcUnreachable", "SUCCESS", "TokenDecimals", "TransactionRecord",
    "block_from_rpc", "block_to_rpc", "chain_config_from_dict", "fetch_block", "load_config",
    "load_fixture", "read_fixture", "record_fixture", "resolve_pool_metadata", "stream_blocks",
]
