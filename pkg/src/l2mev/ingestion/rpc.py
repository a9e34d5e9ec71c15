"""JSON-RPC client with retry, plus block-tagged contract reads."""
from __future__ import annotations

import itertools
import logging
import threading
import time
from typing import Any, Callable, Optional, Sequence

import requests

logger = logging.getLogger(__name__)

METHOD_NOT_FOUND = -32601


class RpcUnreachable(ConnectionError):
    """Transport failed on every allowed attempt."""


class RpcError(RuntimeError):
    def __init__(self, code: int, message: str):
        super().__init__(f"rpc error {code}: {message}")
        self.code = code
        self.message = message


class HttpTransport:
    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint
        self.timeout = timeout
        self._session = requests.Session()

    def __call__(self, payload):
        try:
            resp = self._session.post(self.endpoint, json=payload, timeout=self.timeout)
            resp.raise_for_status()
            return resp.json()
        except (requests.ConnectionError, requests.Timeout, requests.HTTPError) as exc:
            raise RpcUnreachable(str(exc)) from exc


class RpcClient:
    """Sends single or batched JSON-RPC requests, retrying transport failures.

    Backoff sleeps ``backoff_base * backoff_factor**k`` seconds before retry
    ``k + 1``. JSON-RPC error responses are returned to the caller, not retried.
    """

    def __init__(
        self,
        transport: Callable[[Any], Any],
        max_attempts: int = 5,
        backoff_base: float = 0.1,
        backoff_factor: float = 2.0,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        self.transport = transport
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.backoff_factor = backoff_factor
        self.sleep = sleep
        self._ids = itertools.count(1)
        self._id_lock = threading.Lock()
        self.calls = 0

    @classmethod
    def for_endpoint(cls, endpoint: str, **kwargs) -> "RpcClient":
        return cls(HttpTransport(endpoint), **kwargs)

    def _next_id(self) -> int:
        with self._id_lock:
            self.calls += 1
            return next(self._ids)

    def _send(self, payload):
        for attempt in range(self.max_attempts):
            try:
                return self.transport(payload)
            except RpcUnreachable as exc:
                if attempt + 1 == self.max_attempts:
                    raise
                delay = self.backoff_base * self.backoff_factor ** attempt
                logger.debug("rpc attempt %d failed (%s); retrying in %.3fs", attempt + 1, exc, delay)
                self.sleep(delay)

    def request(self, method: str, params: Sequence = ()):
        resp = self._send({"jsonrpc": "2.0", "id": self._next_id(), "method": method, "params": list(params)})
        return _unwrap(resp)

    def batch(self, calls: Sequence[tuple]) -> list:
        """Send ``[(method, params), ...]`` as one request.

        Each element of the result is either the call's result or an
        :class:`RpcError` instance for that call.
        """
        if not calls:
            return []
        payload = [
            {"jsonrpc": "2.0", "id": self._next_id(), "method": m, "params": list(p)} for m, p in calls
        ]
        resp = self._send(payload)
        if isinstance(resp, dict):
            # some servers answer a whole batch with a single error object
            err = _unwrap_error(resp)
            return [err or RpcError(-32603, "malformed batch response")] * len(calls)
        by_id = {r.get("id"): r for r in resp}
        out = []
        for item in payload:
            r = by_id.get(item["id"])
            if r is None:
                out.append(RpcError(-32603, f"missing response for id {item['id']}"))
            else:
                out.append(_unwrap_error(r) or r.get("result"))
        return out

    def chain_id(self) -> int:
        return int(self.request("eth_chainId"), 16)


def _unwrap_error(resp: dict) -> Optional[RpcError]:
    err = resp.get("error")
    if err:
        return RpcError(int(err.get("code", -32603)), str(err.get("message", "")))
    return None


def _unwrap(resp):
    err = _unwrap_error(resp)
    if err:
        raise err
    return resp.get("result")


def block_tag(block: Optional[int]) -> str:
    return "latest" if block is None else hex(block)


class RpcStateReader:
    """Contract reads through ``eth_call``.

    ``call`` returns the raw return data, or ``None`` when the call reverts or
    the target has no code. Transport failures propagate as RpcUnreachable.
    """

    def __init__(self, client: RpcClient):
        self.client = client

    def call(self, to: str, data: bytes, block: Optional[int]) -> Optional[bytes]:
        try:
            result = self.client.request("eth_call", [{"to": to, "data": "0x" + data.hex()}, block_tag(block)])
        except RpcError:
            return None
        if not result or result == "0x":
            return None
        return bytes.fromhex(result[2:])
