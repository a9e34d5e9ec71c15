"""Pool metadata (token pair, decimals, fee tier) with a concurrency-safe cache."""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional

from ..abi import encode_call, normalize_address, word_address, word_uint, words


@dataclass(frozen=True)
class PoolMetadata:
    pool: str
    token0: str
    token1: str
    decimals0: int
    decimals1: int
    family: str
    fee_tier: Optional[int] = None

    def __post_init__(self):
        if not self.token0 < self.token1:
            raise ValueError(f"pool {self.pool}: token0 must sort before token1")
        for d in (self.decimals0, self.decimals1):
            if not 0 <= d <= 36:
                raise ValueError(f"pool {self.pool}: decimals {d} outside 0..36")
        if self.family not in ("v2", "v3"):
            raise ValueError(f"unknown pool family {self.family!r}")


def _read_word(state, to, signature, block) -> Optional[bytes]:
    out = state.call(to, encode_call(signature), block)
    if not out or len(out) < 32:
        return None
    return words(out[: len(out) - len(out) % 32])[0]


class TokenDecimals:
    """Caches ERC-20 ``decimals()`` per token; ``None`` when the token does not answer."""

    def __init__(self, state):
        self.state = state
        self._cache: dict = {}
        self._lock = threading.Lock()

    def __call__(self, token: str) -> Optional[int]:
        with self._lock:
            if token in self._cache:
                return self._cache[token]
        w = _read_word(self.state, token, "decimals()", None)
        value = word_uint(w) if w is not None else None
        if value is not None and value > 36:
            value = None
        with self._lock:
            self._cache[token] = value
        return value


class PoolMetadataResolver:
    """Resolves and caches :class:`PoolMetadata` keyed by pool address.

    Pool metadata never changes, so reads use the ``latest`` tag and each
    pool costs contract calls at most once. Pools that fail to answer are
    remembered as unresolvable and reported through ``unresolvable``.
    """

    def __init__(self, state, decimals: Optional[TokenDecimals] = None):
        self.state = state
        self.decimals = decimals or TokenDecimals(state)
        self._cache: dict = {}
        self._lock = threading.Lock()

    def __call__(self, pool: str, family: str, block: Optional[int] = None) -> Optional[PoolMetadata]:
        return self.resolve(pool, family, block)

    def resolve(self, pool: str, family: str, block: Optional[int] = None) -> Optional[PoolMetadata]:
        key = (pool, family)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        meta = self._lookup(pool, family)
        with self._lock:
            return self._cache.setdefault(key, meta)

    @property
    def unresolvable(self) -> list:
        with self._lock:
            return sorted(p for (p, _), m in self._cache.items() if m is None)

    def _lookup(self, pool, family) -> Optional[PoolMetadata]:
        w0 = _read_word(self.state, pool, "token0()", None)
        w1 = _read_word(self.state, pool, "token1()", None)
        if w0 is None or w1 is None:
            return None
        token0, token1 = normalize_address(word_address(w0)), normalize_address(word_address(w1))
        fee = None
        if family == "v3":
            wf = _read_word(self.state, pool, "fee()", None)
            if wf is None:
                return None
            fee = word_uint(wf)
        d0, d1 = self.decimals(token0), self.decimals(token1)
        if d0 is None or d1 is None:
            return None
        try:
            return PoolMetadata(pool, token0, token1, d0, d1, family, fee)
        except ValueError:
            return None


def resolve_pool_metadata(cfg, pool: str, block: Optional[int], resolver: PoolMetadataResolver,
                          family: str = "v2") -> Optional[PoolMetadata]:
    """Functional entry point; ``None`` marks the pool unresolvable."""
    return resolver.resolve(normalize_address(pool), family, block)
