"""Topic-0 registry mapping event signature hashes to decodable event kinds."""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional

import yaml

from ..abi import keccak256

KINDS = ("swap_v2", "swap_v3", "liquidation_aave", "liquidation_compound")
SWAP_KINDS = {"swap_v2": "v2", "swap_v3": "v3"}

_CANONICAL = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*\([A-Za-z0-9_,\[\]()]*\)$")


class RegistryError(ValueError):
    pass


def topic_for_signature(signature: str) -> str:
    """keccak-256 of the UTF-8 signature text, as a 0x-prefixed hex topic."""
    return "0x" + keccak256(signature.encode("utf-8")).hex()


@dataclass(frozen=True)
class RegistryEntry:
    signature: str
    family: str
    kind: str
    topic: str


class EventRegistry:
    def __init__(self, entries: Mapping[str, RegistryEntry]):
        self.entries = dict(entries)

    @classmethod
    def from_signatures(cls, triples: Iterable[tuple]) -> "EventRegistry":
        entries: dict = {}
        for signature, family, kind in triples:
            if kind not in KINDS:
                raise RegistryError(f"{signature}: unknown event kind {kind!r}")
            if not _CANONICAL.match(signature):
                raise RegistryError(f"not a canonical event signature: {signature!r}")
            topic = topic_for_signature(signature)
            if topic in entries:
                raise RegistryError(f"duplicate topic {topic} for {signature!r}")
            entries[topic] = RegistryEntry(signature, family, kind, topic)
        return cls(entries)

    def get(self, topic: str) -> Optional[RegistryEntry]:
        return self.entries.get(topic)

    def topic_of(self, kind: str) -> list:
        return sorted(t for t, e in self.entries.items() if e.kind == kind)

    def verify(self) -> None:
        """Recompute every topic from its signature; raise on any mismatch."""
        for topic, entry in self.entries.items():
            if topic_for_signature(entry.signature) != topic or entry.topic != topic:
                raise RegistryError(f"topic mismatch for {entry.signature!r}")

    def __len__(self):
        return len(self.entries)

    def __contains__(self, topic):
        return topic in self.entries


def read_registry_file(path) -> list:
    """Read ``(signature, family, kind)`` triples from a YAML list."""
    with Path(path).open(encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or []
    return _triples(raw, str(path))


def _triples(raw, origin) -> list:
    if not isinstance(raw, list):
        raise RegistryError(f"{origin}: expected a list of entries")
    try:
        return [(e["signature"], e["family"], e["kind"]) for e in raw]
    except (KeyError, TypeError) as exc:
        raise RegistryError(f"{origin}: bad registry entry ({exc})") from None


def default_signatures() -> list:
    text = resources.files("l2mev.data").joinpath("default_registry.yaml").read_text(encoding="utf-8")
    return _triples(yaml.safe_load(text), "default_registry.yaml")


def build_registry(extensions: Iterable[tuple] = (), include_defaults: bool = True) -> EventRegistry:
    triples = (default_signatures() if include_defaults else []) + list(extensions)
    registry = EventRegistry.from_signatures(triples)
    registry.verify()
    return registry
