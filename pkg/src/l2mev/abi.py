"""Minimal ABI word helpers for event data and eth_call payloads."""
from __future__ import annotations

from functools import lru_cache

from Crypto.Hash import keccak

WORD = 32
ZERO_ADDRESS = "0x" + "00" * 20


def keccak256(data: bytes) -> bytes:
    h = keccak.new(digest_bits=256)
    h.update(data)
    return h.digest()


@lru_cache(maxsize=None)
def selector(signature: str) -> bytes:
    """4-byte function selector for a canonical signature such as ``getPair(address,address)``."""
    return keccak256(signature.encode("utf-8"))[:4]


def normalize_address(value: str) -> str:
    s = value.lower()
    if not s.startswith("0x"):
        s = "0x" + s
    if len(s) != 42:
        raise ValueError(f"not a 20-byte address: {value!r}")
    int(s[2:], 16)
    return s


def normalize_hash(value: str) -> str:
    s = value.lower()
    if not s.startswith("0x"):
        s = "0x" + s
    if len(s) != 66:
        raise ValueError(f"not a 32-byte value: {value!r}")
    int(s[2:], 16)
    return s


def encode_uint(value: int) -> bytes:
    if value < 0 or value >= 1 << 256:
        raise ValueError(f"uint256 out of range: {value}")
    return value.to_bytes(WORD, "big")


def encode_int(value: int) -> bytes:
    if not -(1 << 255) <= value < 1 << 255:
        raise ValueError(f"int256 out of range: {value}")
    return (value % (1 << 256)).to_bytes(WORD, "big")


def encode_address(address: str) -> bytes:
    return bytes(12) + bytes.fromhex(normalize_address(address)[2:])


def encode_call(signature: str, *args: bytes) -> bytes:
    return selector(signature) + b"".join(args)


def words(data: bytes) -> list[bytes]:
    if len(data) % WORD:
        raise ValueError(f"data length {len(data)} is not a multiple of {WORD}")
    return [data[i:i + WORD] for i in range(0, len(data), WORD)]


def word_uint(word: bytes) -> int:
    return int.from_bytes(word, "big")


def word_int(word: bytes) -> int:
    v = int.from_bytes(word, "big")
    return v - (1 << 256) if v >= 1 << 255 else v


def word_address(word: bytes) -> str:
    return "0x" + word[-20:].hex()


def topic_address(topic: str) -> str:
    return "0x" + topic[-40:].lower()


def address_topic(address: str) -> str:
    return "0x" + encode_address(address).hex()
