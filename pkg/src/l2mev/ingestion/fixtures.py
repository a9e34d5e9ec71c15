"""Line-delimited fixture files: record/replay of blocks and contract reads.

Layout: a header line ``{"format": "l2mev-fixture", "version": 1, "chain_id": N}``
followed by one JSON object per line, either ``{"type": "block", ...}`` or a
recorded ``{"type": "call", "to", "data", "block", "result"}``.
"""
from __future__ import annotations

import bisect
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .fetch import block_to_rpc
from .model import BlockData, LogRecord, TransactionRecord

FORMAT_NAME = "l2mev-fixture"
FORMAT_VERSION = 1


class FixtureError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class FixtureVersionError(FixtureError):
    pass


@dataclass
class Fixture:
    chain_id: int
    blocks: list = field(default_factory=list)
    calls: dict = field(default_factory=dict)


def block_to_dict(block: BlockData) -> dict:
    return {
        "type": "block",
        "number": block.number,
        "timestamp": block.timestamp,
        "transactions": [
            {
                "hash": tx.hash,
                "index": tx.index,
                "sender": tx.sender,
                "recipient": tx.recipient,
                "gas_used": tx.gas_used,
                "status": tx.status,
                "logs": [
                    {
                        "address": log.address,
                        "topics": list(log.topics),
                        "data": log.data.hex(),
                        "log_index": log.log_index,
                    }
                    for log in tx.logs
                ],
            }
            for tx in block.transactions
        ],
    }


def block_from_dict(d: dict) -> BlockData:
    return BlockData(
        number=d["number"],
        timestamp=d["timestamp"],
        transactions=tuple(
            TransactionRecord(
                hash=tx["hash"],
                index=tx["index"],
                sender=tx["sender"],
                recipient=tx["recipient"],
                gas_used=tx["gas_used"],
                status=tx["status"],
                logs=tuple(
                    LogRecord(
                        address=log["address"],
                        topics=tuple(log["topics"]),
                        data=bytes.fromhex(log["data"]),
                        log_index=log["log_index"],
                    )
                    for log in tx["logs"]
                ),
            )
            for tx in d["transactions"]
        ),
    )


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def record_fixture(blocks: Iterable[BlockData], path, *, chain_id: int = 0, calls: Optional[dict] = None) -> Path:
    """Write ``blocks`` (and optionally recorded calls) to ``path``."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(_dumps({"format": FORMAT_NAME, "version": FORMAT_VERSION, "chain_id": chain_id}) + "\n")
        for block in blocks:
            fh.write(_dumps(block_to_dict(block)) + "\n")
        for (to, data, block_no), result in sorted((calls or {}).items(), key=_call_sort_key):
            fh.write(_dumps({
                "type": "call",
                "to": to,
                "data": data,
                "block": block_no,
                "result": None if result is None else result.hex(),
            }) + "\n")
    tmp.replace(path)
    return path


def _call_sort_key(item):
    (to, data, block_no), _ = item
    return (to, data, -1 if block_no is None else block_no)


def read_fixture(path) -> Fixture:
    path = Path(path)
    fixture = Fixture(chain_id=0)
    with path.open(encoding="utf-8") as fh:
        header_seen = False
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FixtureError(f"malformed JSON ({exc.msg})", lineno) from None
            if not isinstance(obj, dict):
                raise FixtureError("expected a JSON object", lineno)
            if not header_seen:
                if obj.get("format") != FORMAT_NAME:
                    raise FixtureError("missing fixture header", lineno)
                if obj.get("version") != FORMAT_VERSION:
                    raise FixtureVersionError(
                        f"fixture version {obj.get('version')!r} unsupported (expected {FORMAT_VERSION})", lineno
                    )
                fixture.chain_id = int(obj.get("chain_id", 0))
                header_seen = True
                continue
            kind = obj.get("type")
            try:
                if kind == "block":
                    fixture.blocks.append(block_from_dict(obj))
                elif kind == "call":
                    result = obj["result"]
                    fixture.calls[(obj["to"], obj["data"], obj["block"])] = (
                        None if result is None else bytes.fromhex(result)
                    )
                else:
                    raise FixtureError(f"unknown record type {kind!r}", lineno)
            except FixtureError:
                raise
            except (KeyError, TypeError, ValueError) as exc:
                raise FixtureError(f"invalid {kind} record: {exc}", lineno) from None
    return fixture


def load_fixture(path) -> list:
    """Blocks stored in a fixture file, in file order."""
    return read_fixture(path).blocks


class RecordedCalls:
    """Replays contract reads captured in a fixture.

    A read at block ``b`` that was never recorded answers with the latest
    recording of the same call at a block ``<= b`` (state carried forward),
    then with a ``latest``-tagged recording; otherwise it behaves as a revert.
    """

    def __init__(self, calls: dict):
        self._exact = dict(calls)
        self._by_call: dict = {}
        for (to, data, block_no), result in calls.items():
            if block_no is not None:
                self._by_call.setdefault((to, data), []).append((block_no, result))
        for entries in self._by_call.values():
            entries.sort(key=lambda e: e[0])
        self._blocks = {k: [b for b, _ in v] for k, v in self._by_call.items()}
        self.misses = 0

    def call(self, to: str, data: bytes, block: Optional[int]) -> Optional[bytes]:
        hexdata = data.hex()
        key = (to, hexdata, block)
        if key in self._exact:
            return self._exact[key]
        if block is not None:
            blocks = self._blocks.get((to, hexdata))
            if blocks:
                i = bisect.bisect_right(blocks, block)
                if i:
                    return self._by_call[(to, hexdata)][i - 1][1]
        latest = (to, hexdata, None)
        if latest in self._exact:
            return self._exact[latest]
        self.misses += 1
        return None


class RecordingStateReader:
    """Wraps a state reader and keeps every answered call for a fixture."""

    def __init__(self, inner):
        self.inner = inner
        self.calls: dict = {}
        self._lock = threading.Lock()

    def call(self, to: str, data: bytes, block: Optional[int]) -> Optional[bytes]:
        result = self.inner.call(to, data, block)
        with self._lock:
            self.calls[(to, data.hex(), block)] = result
        return result


class FixtureNode:
    """A JSON-RPC transport answering from in-memory blocks and a state reader.

    Supports eth_chainId, eth_blockNumber, eth_getBlockByNumber,
    eth_getBlockReceipts (unless disabled), eth_getTransactionReceipt and
    eth_call. Useful for exercising the RPC ingestion path offline.
    """

    def __init__(self, blocks: Iterable[BlockData], chain_id: int = 0, state=None, block_receipts: bool = True):
        self.blocks = {b.number: b for b in blocks}
        self.chain_id = chain_id
        self.state = state
        self.block_receipts = block_receipts
        self.requests = 0
        self._rpc_cache: dict = {}

    def _rpc(self, number):
        if number not in self._rpc_cache:
            self._rpc_cache[number] = block_to_rpc(self.blocks[number])
        return self._rpc_cache[number]

    def __call__(self, payload):
        self.requests += 1
        if isinstance(payload, list):
            return [self._handle(p) for p in payload]
        return self._handle(payload)

    def _handle(self, req):
        method, params = req["method"], req.get("params") or []
        rid = req.get("id")
        try:
            result = self._dispatch(method, params)
        except _MethodError as exc:
            return {"jsonrpc": "2.0", "id": rid, "error": {"code": exc.code, "message": str(exc)}}
        return {"jsonrpc": "2.0", "id": rid, "result": result}

    def _dispatch(self, method, params):
        if method == "eth_chainId":
            return hex(self.chain_id)
        if method == "eth_blockNumber":
            return hex(max(self.blocks)) if self.blocks else "0x0"
        if method == "eth_getBlockByNumber":
            n = int(params[0], 16)
            return self._rpc(n)[0] if n in self.blocks else None
        if method == "eth_getBlockReceipts":
            if not self.block_receipts:
                raise _MethodError(-32601, "the method eth_getBlockReceipts does not exist")
            n = int(params[0], 16)
            return self._rpc(n)[1] if n in self.blocks else None
        if method == "eth_getTransactionReceipt":
            for n in self.blocks:
                for r in self._rpc(n)[1]:
                    if r["transactionHash"] == params[0]:
                        return r
            return None
        if method == "eth_call":
            if self.state is None:
                raise _MethodError(-32000, "execution reverted")
            tag = params[1]
            block = None if tag == "latest" else int(tag, 16)
            out = self.state.call(params[0]["to"], bytes.fromhex(params[0]["data"][2:]), block)
            if out is None:
                raise _MethodError(3, "execution reverted")
            return "0x" + out.hex()
        raise _MethodError(-32601, f"the method {method} does not exist")


class _MethodError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code
