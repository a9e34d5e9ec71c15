"""Block + receipt ingestion over JSON-RPC with bounded, order-preserving parallelism."""
from __future__ import annotations

import logging
from typing import Callable, Iterator, Optional

from ..abi import normalize_address, normalize_hash
from ..concurrency import ordered_map
from .config import ChainConfig
from .model import REVERTED, SUCCESS, BlockData, LogRecord, TransactionRecord
from .rpc import RpcClient, RpcError

logger = logging.getLogger(__name__)


class BlockNotFound(LookupError):
    def __init__(self, number: int):
        super().__init__(f"block {number} not found (beyond chain head?)")
        self.number = number


class BlockFetchError(RuntimeError):
    """Wraps the failure of one block so a consumer can resume from ``number``."""

    def __init__(self, number: int, cause: BaseException):
        super().__init__(f"failed to fetch block {number}: {cause}")
        self.number = number
        self.cause = cause


def _client(cfg: ChainConfig, client: Optional[RpcClient]) -> RpcClient:
    return client if client is not None else RpcClient.for_endpoint(cfg.rpc_endpoint)


def fetch_block(cfg: ChainConfig, number: int, client: Optional[RpcClient] = None) -> BlockData:
    """Fetch block ``number`` with full transactions and their receipt logs.

    Block and receipts go out as a single batched request; nodes without
    ``eth_getBlockReceipts`` get one follow-up batch of per-transaction
    receipt lookups.
    """
    if number < 0:
        raise ValueError("block number must be >= 0")
    client = _client(cfg, client)
    tag = hex(number)
    block_json, receipts = client.batch([
        ("eth_getBlockByNumber", [tag, True]),
        ("eth_getBlockReceipts", [tag]),
    ])
    if isinstance(block_json, RpcError):
        raise block_json
    if block_json is None:
        raise BlockNotFound(number)
    txs = block_json.get("transactions") or []
    if isinstance(receipts, RpcError) or receipts is None:
        logger.debug("eth_getBlockReceipts unavailable (%s); falling back per transaction", receipts)
        receipts = client.batch([("eth_getTransactionReceipt", [tx["hash"]]) for tx in txs])
        for r in receipts:
            if isinstance(r, RpcError):
                raise r
            if r is None:
                raise RpcError(-32000, f"missing receipt in block {number}")
    return block_from_rpc(block_json, receipts)


def block_from_rpc(block_json: dict, receipts: list) -> BlockData:
    number = int(block_json["number"], 16)
    by_hash = {normalize_hash(r["transactionHash"]): r for r in receipts}
    txs = []
    for tx in sorted(block_json.get("transactions") or [], key=lambda t: int(t["transactionIndex"], 16)):
        h = normalize_hash(tx["hash"])
        receipt = by_hash.get(h)
        if receipt is None:
            raise RpcError(-32000, f"no receipt for transaction {h}")
        status = SUCCESS if int(receipt.get("status", "0x1"), 16) == 1 else REVERTED
        logs = ()
        if status == SUCCESS:
            entries = []
            for log in receipt.get("logs") or []:
                if "blockNumber" in log and int(log["blockNumber"], 16) != number:
                    raise RpcError(-32000, f"log in block {number} reports block {log['blockNumber']}")
                entries.append(LogRecord(
                    address=normalize_address(log["address"]),
                    topics=tuple(t.lower() for t in log.get("topics") or ()),
                    data=bytes.fromhex(log.get("data", "0x")[2:]),
                    log_index=int(log["logIndex"], 16),
                ))
            logs = tuple(sorted(entries, key=lambda e: e.log_index))
        txs.append(TransactionRecord(
            hash=h,
            index=int(tx["transactionIndex"], 16),
            sender=normalize_address(tx["from"]),
            recipient=normalize_address(tx["to"]) if tx.get("to") else None,
            gas_used=int(receipt.get("gasUsed", "0x0"), 16),
            status=status,
            logs=logs,
        ))
    return BlockData(number=number, timestamp=int(block_json["timestamp"], 16), transactions=tuple(txs))


def block_to_rpc(block: BlockData) -> tuple[dict, list]:
    """Inverse of :func:`block_from_rpc`; used by fixture-backed nodes."""
    txs, receipts = [], []
    for tx in block.transactions:
        txs.append({
            "hash": tx.hash,
            "transactionIndex": hex(tx.index),
            "from": tx.sender,
            "to": tx.recipient,
            "blockNumber": hex(block.number),
        })
        receipts.append({
            "transactionHash": tx.hash,
            "transactionIndex": hex(tx.index),
            "blockNumber": hex(block.number),
            "status": "0x1" if tx.status == SUCCESS else "0x0",
            "gasUsed": hex(tx.gas_used),
            "logs": [
                {
                    "address": log.address,
                    "topics": list(log.topics),
                    "data": "0x" + log.data.hex(),
                    "logIndex": hex(log.log_index),
                    "blockNumber": hex(block.number),
                    "transactionHash": tx.hash,
                }
                for log in tx.logs
            ],
        })
    return (
        {"number": hex(block.number), "timestamp": hex(block.timestamp), "transactions": txs},
        receipts,
    )


def stream_blocks(
    cfg: ChainConfig,
    start: int,
    stop: int,
    client: Optional[RpcClient] = None,
    *,
    max_parallel: Optional[int] = None,
    fetch: Optional[Callable[[int], BlockData]] = None,
) -> Iterator[BlockData]:
    """Yield blocks ``start..stop`` (inclusive) in ascending order.

    At most ``max_parallel`` fetches (default ``cfg.max_parallel_requests``)
    are in flight. A failure is raised as :class:`BlockFetchError` once every
    earlier block has been yielded.
    """
    if start > stop:
        raise ValueError(f"empty range: from {start} > to {stop}")
    if fetch is None:
        client = _client(cfg, client)
        fetch = lambda n: fetch_block(cfg, n, client)  # noqa: E731
    width = max_parallel or cfg.max_parallel_requests
    if width < 1:
        raise ValueError("max_parallel must be >= 1")
    return ordered_map(fetch, range(start, stop + 1), width, on_error=BlockFetchError)
