"""Chain configuration and its YAML loader."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Tuple

import yaml

from ..abi import normalize_address

RPC_ENV_VAR = "L2MEV_RPC_URL"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DexFactory:
    address: str
    family: str
    fee_tiers: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.family not in ("v2", "v3"):
            raise ConfigError(f"factory {self.address}: family must be v2 or v3, got {self.family!r}")
        if self.family == "v3" and not self.fee_tiers:
            raise ConfigError(f"v3 factory {self.address} needs at least one fee tier")


@dataclass(frozen=True)
class ChainConfig:
    chain_id: int
    rpc_endpoint: str
    native_wrapped_token: str
    usdc_token: str
    dex_factories: Tuple[DexFactory, ...] = ()
    sandwiches_possible: bool = True
    blocks_per_batch: int = 100
    max_parallel_requests: int = 8
    name: str = ""
    usdc_decimals: int = 6
    native_hop: bool = True
    registry_extensions: Tuple[Tuple[str, str, str], ...] = ()
    token_labels: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.usdc_token == self.native_wrapped_token:
            raise ConfigError("usdc_token must differ from native_wrapped_token")
        if self.blocks_per_batch < 1:
            raise ConfigError("blocks_per_batch must be >= 1")
        if self.max_parallel_requests < 1:
            raise ConfigError("max_parallel_requests must be >= 1")

    def label(self, token: str) -> str:
        return self.token_labels.get(token, token)


def chain_config_from_dict(raw: Mapping, *, env: Optional[Mapping[str, str]] = None) -> ChainConfig:
    env = os.environ if env is None else env
    try:
        factories = tuple(
            DexFactory(
                address=normalize_address(f["address"]),
                family=f["family"],
                fee_tiers=tuple(int(t) for t in f.get("fee_tiers", ())),
            )
            for f in raw.get("dex_factories", ())
        )
        extensions = tuple(
            (e["signature"], e["family"], e["kind"]) for e in raw.get("registry_extensions", ())
        )
        labels = {normalize_address(k): str(v) for k, v in (raw.get("token_labels") or {}).items()}
        return ChainConfig(
            chain_id=int(raw["chain_id"]),
            rpc_endpoint=env.get(RPC_ENV_VAR) or raw.get("rpc_endpoint", ""),
            native_wrapped_token=normalize_address(raw["native_wrapped_token"]),
            usdc_token=normalize_address(raw["usdc_token"]),
            dex_factories=factories,
            sandwiches_possible=bool(raw.get("sandwiches_possible", True)),
            blocks_per_batch=int(raw.get("blocks_per_batch", 100)),
            max_parallel_requests=int(raw.get("max_parallel_requests", 8)),
            name=str(raw.get("name", "")),
            usdc_decimals=int(raw.get("usdc_decimals", 6)),
            native_hop=bool(raw.get("native_hop", True)),
            registry_extensions=extensions,
            token_labels=labels,
        )
    except KeyError as exc:
        raise ConfigError(f"missing config key: {exc.args[0]}") from None


def load_config(path, *, env: Optional[Mapping[str, str]] = None) -> ChainConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    with path.open(encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    return chain_config_from_dict(raw, env=env)


def chain_config_to_dict(cfg: ChainConfig) -> dict:
    return {
        "name": cfg.name,
        "chain_id": cfg.chain_id,
        "rpc_endpoint": cfg.rpc_endpoint,
        "native_wrapped_token": cfg.native_wrapped_token,
        "usdc_token": cfg.usdc_token,
        "usdc_decimals": cfg.usdc_decimals,
        "sandwiches_possible": cfg.sandwiches_possible,
        "native_hop": cfg.native_hop,
        "blocks_per_batch": cfg.blocks_per_batch,
        "max_parallel_requests": cfg.max_parallel_requests,
        "dex_factories": [
            {"address": f.address, "family": f.family, **({"fee_tiers": list(f.fee_tiers)} if f.fee_tiers else {})}
            for f in cfg.dex_factories
        ],
        "registry_extensions": [
            {"signature": s, "family": fam, "kind": k} for s, fam, k in cfg.registry_extensions
        ],
        "token_labels": dict(cfg.token_labels),
    }
