"""``l2mev`` command line: inspect, report, price and fixture tooling.

Exit codes: 0 success, 1 runtime failure, 2 usage error. Progress goes to
stderr; ``inspect`` ends with one JSON summary line on stdout.
"""
from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal
from pathlib import Path

import yaml

from .abi import normalize_address
from .analytics import build_report, write_report
from .ingestion.config import ConfigError, chain_config_to_dict, load_config
from .ingestion.fetch import stream_blocks
from .ingestion.fixtures import FixtureError, RecordedCalls, RecordingStateReader, read_fixture, record_fixture
from .ingestion.rpc import RpcClient, RpcStateReader
from .pipeline import InspectionError, run_inspection
from .pricing.ammmath import to_decimal
from .pricing.quotes import PriceOracle
from .storage import CoverageGap, MevStore, StorageError

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _err(msg: str):
    print(f"l2mev: {msg}", file=sys.stderr)


def _load_config(path):
    try:
        return load_config(path)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _load_fixture(path):
    if not Path(path).is_file():
        raise UsageError(f"fixture not found: {path}")
    return read_fixture(path)


def _rpc(cfg):
    if not cfg.rpc_endpoint:
        raise UsageError("no RPC endpoint (set rpc_endpoint in the config or L2MEV_RPC_URL)")
    return RpcClient.for_endpoint(cfg.rpc_endpoint)


def _range(args):
    if args.from_block is None or args.to_block is None:
        raise UsageError("--from and --to are required together")
    if args.from_block > args.to_block:
        raise UsageError(f"empty range: --from {args.from_block} > --to {args.to_block}")
    return args.from_block, args.to_block


def cmd_inspect(args) -> int:
    cfg = _load_config(args.config)
    if args.parallelism < 1:
        raise UsageError("--parallelism must be >= 1")
    if args.fixture:
        fixture = _load_fixture(args.fixture)
        if fixture.chain_id and fixture.chain_id != cfg.chain_id:
            raise UsageError(f"fixture is for chain {fixture.chain_id}, config for chain {cfg.chain_id}")
        blocks = fixture.blocks
        if args.from_block is not None or args.to_block is not None:
            lo = args.from_block if args.from_block is not None else -1
            hi = args.to_block if args.to_block is not None else float("inf")
            blocks = [b for b in blocks if lo <= b.number <= hi]
        state = RecordedCalls(fixture.calls)
    else:
        start, stop = _range(args)
        client = _rpc(cfg)
        blocks = stream_blocks(cfg, start, stop, client, max_parallel=args.parallelism)
        state = RpcStateReader(client)

    def progress(s):
        print(f"[{cfg.name or cfg.chain_id}] {s.blocks} blocks (up to {s.last_block}), "
              f"{sum(s.findings.values())} findings, {s.blocks_per_second:.1f} blocks/s", file=sys.stderr)

    with MevStore(args.store) as store:
        try:
            summary = run_inspection(cfg, blocks, state, store, parallelism=args.parallelism,
                                     progress_every=args.progress_every, progress=progress)
        except InspectionError as exc:
            _err(f"failed at block {exc.block_number}: {exc.cause}")
            return EXIT_FAILURE
    print(json.dumps({"command": "inspect", "chain_id": cfg.chain_id, **summary.as_dict()}, sort_keys=True))
    return EXIT_OK


def _reference_totals(path):
    if path is None:
        return None
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"reference totals file not found: {path}")
    raw = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
    if not isinstance(raw, dict):
        raise UsageError("reference totals must be a mapping of label -> value")
    return {str(k): str(v) for k, v in raw.items()}


def cmd_report(args) -> int:
    if not Path(args.store).is_file():
        raise UsageError(f"store not found: {args.store}")
    labels = dict(_load_config(args.config).token_labels) if args.config else {}
    refs = _reference_totals(args.reference_totals)
    with MevStore(args.store) as store:
        if args.from_block is None or args.to_block is None:
            known = store.block_range(args.chain)
            lo, hi = known if known else (0, -1)
            block_range = (args.from_block if args.from_block is not None else lo,
                           args.to_block if args.to_block is not None else hi)
        else:
            block_range = (args.from_block, args.to_block)
        try:
            report = build_report(store, args.chain, block_range, token_labels=labels, reference_totals=refs)
        except CoverageGap as exc:
            _err("range not fully inspected; missing blocks: "
                 + ", ".join(f"{a}-{b}" if a != b else str(a) for a, b in exc.gaps))
            return EXIT_FAILURE
    paths = write_report(report, args.out)
    print(json.dumps({"command": "report", "chain_id": args.chain, "block_range": list(block_range),
                      "total_usd_profit": format(report.total_usd_profit, "f"),
                      "files": [str(p) for p in paths]}, sort_keys=True))
    return EXIT_OK


def format_price(value) -> str:
    d = to_decimal(value).normalize()
    text = format(d, "f")
    return text if "." in text else text + ".0"


def cmd_price(args) -> int:
    cfg = _load_config(args.config)
    if args.fixture:
        state = RecordedCalls(_load_fixture(args.fixture).calls)
    else:
        state = RpcStateReader(_rpc(cfg))
    try:
        token = normalize_address(args.token)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    price = PriceOracle(cfg, state).price_token_usd(token, args.block)
    shown = "unpriced" if price.usd_price is None else format_price(price.usd_price)
    if args.json:
        print(json.dumps({"token": token, "block": args.block, "usd_price": None if price.usd_price is None else shown,
                          "route": price.route, "source_pools": list(price.source_pools)}, sort_keys=True))
    else:
        print(f"{token} {args.block} {shown} {price.route}")
    return EXIT_OK


def cmd_fixture_record(args) -> int:
    cfg = _load_config(args.config)
    start, stop = _range(args)
    client = _rpc(cfg)
    reader = RecordingStateReader(RpcStateReader(client))
    blocks = []
    try:
        run_inspection(cfg, stream_blocks(cfg, start, stop, client), reader,
                       on_block=lambda b, f, r: blocks.append(b))
    except InspectionError as exc:
        _err(f"failed at block {exc.block_number}: {exc.cause}")
        return EXIT_FAILURE
    record_fixture(blocks, args.out, chain_id=cfg.chain_id, calls=reader.calls)
    print(json.dumps({"command": "fixture record", "blocks": len(blocks), "calls": len(reader.calls),
                      "out": str(args.out)}, sort_keys=True))
    return EXIT_OK


def cmd_fixture_validate(args) -> int:
    try:
        fixture = _load_fixture(args.path)
    except FixtureError as exc:
        print(f"invalid: line {exc.line}: {exc}")
        return EXIT_FAILURE
    numbers = [b.number for b in fixture.blocks]
    if len(set(numbers)) != len(numbers):
        print("invalid: duplicate block numbers")
        return EXIT_FAILURE
    print("ok")
    return EXIT_OK


def cmd_fixture_synth(args) -> int:
    from .synthetic import generate_corpus, record_corpus_fixture

    if args.blocks < 1:
        raise UsageError("--blocks must be >= 1")
    corpus = generate_corpus(args.blocks, args.seed, start_block=args.start, chain_id=args.chain_id,
                             sandwiches_possible=not args.no_sandwiches)
    record_corpus_fixture(corpus, args.out)
    out = Path(args.out)
    config_path = Path(args.config_out) if args.config_out else out.with_suffix(".config.yaml")
    config_path.write_text(yaml.safe_dump(chain_config_to_dict(corpus.config), sort_keys=True), encoding="utf-8")
    manifest_path = Path(args.manifest_out) if args.manifest_out else out.with_suffix(".manifest.json")
    manifest_path.write_text(json.dumps(corpus.manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    print(json.dumps({"command": "fixture synth", "blocks": len(corpus.blocks), "planted": corpus.counts(),
                      "fixture": str(out), "config": str(config_path), "manifest": str(manifest_path)},
                     sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="l2mev", description="Log-based MEV inspection for EVM rollups.")
    sub = p.add_subparsers(dest="command", required=True)

    def add_range(sp):
        sp.add_argument("--from", dest="from_block", type=int)
        sp.add_argument("--to", dest="to_block", type=int)

    sp = sub.add_parser("inspect", help="inspect a block range or fixture and persist findings")
    sp.add_argument("--config", required=True)
    add_range(sp)
    sp.add_argument("--fixture")
    sp.add_argument("--parallelism", type=int, default=1)
    sp.add_argument("--store", default="l2mev.sqlite")
    sp.add_argument("--progress-every", type=int, default=100)
    sp.set_defaults(func=cmd_inspect)

    sp = sub.add_parser("report", help="aggregate stored findings into report files")
    sp.add_argument("--store", required=True)
    sp.add_argument("--chain", type=int, required=True)
    add_range(sp)
    sp.add_argument("--reference-totals")
    sp.add_argument("--config", help="optional chain config, used for token labels")
    sp.add_argument("--out", default="report")
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("price", help="USD price of a token at a block")
    sp.add_argument("--config", required=True)
    sp.add_argument("--token", required=True)
    sp.add_argument("--block", type=int, required=True)
    sp.add_argument("--fixture")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_price)

    fx = sub.add_parser("fixture", help="record, validate or synthesize fixtures")
    fsub = fx.add_subparsers(dest="fixture_command", required=True)
    sp = fsub.add_parser("record")
    sp.add_argument("--config", required=True)
    add_range(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_fixture_record)
    sp = fsub.add_parser("validate")
    sp.add_argument("path")
    sp.set_defaults(func=cmd_fixture_validate)
    sp = fsub.add_parser("synth", help="generate a planted corpus with config and manifest")
    sp.add_argument("--blocks", type=int, default=50)
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--start", type=int, default=1)
    sp.add_argument("--chain-id", type=int, default=137)
    sp.add_argument("--no-sandwiches", action="store_true")
    sp.add_argument("--out", required=True)
    sp.add_argument("--config-out")
    sp.add_argument("--manifest-out")
    sp.set_defaults(func=cmd_fixture_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except (StorageError, FixtureError, OSError, RuntimeError, ValueError) as exc:
        _err(str(exc))
        return EXIT_FAILURE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
