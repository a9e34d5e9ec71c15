import sys
from decimal import Decimal
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from l2mev.decoder.events import SwapEvent  # noqa: E402
from l2mev.pricing.records import PricedMevRecord  # noqa: E402
from l2mev.synthetic import generate_corpus, record_corpus_fixture  # noqa: E402


def addr(n):
    return "0x" + format(n, "040x")


def swap(pool, tin, tout, ain, aout, log, tx="0xaa", initiator=None, block=1, tx_index=0):
    initiator = initiator or addr(0xEE)
    return SwapEvent(tx_hash=tx, block_number=block, log_index=log, pool=pool, token_in=tin, token_out=tout,
                     amount_in=ain, amount_out=aout, initiator=initiator, recipient=initiator, tx_index=tx_index)


def record(block=1, ts=1_600_000_000, tx="0x01", usd="1", token=addr(1), kind="arbitrage", tx_index=0, ordinal=0,
           raw=1):
    return PricedMevRecord(block_number=block, timestamp=ts, tx_hash=tx, tx_index=tx_index, ordinal=ordinal,
                           kind=kind, profit_token=token, profit_raw=raw,
                           usd_profit=None if usd is None else Decimal(usd),
                           route="unpriced" if usd is None else "direct_usdc", path_length=2)


def manifest_keys(manifest):
    return {(m["kind"], tuple(sorted(tuple(k) for k in m["swaps"]))) for m in manifest}


def finding_keys(findings_iter):
    out = set()
    for f in findings_iter:
        for a in f.arbitrages:
            out.add(("arbitrage", tuple(sorted(s.key for s in a.path))))
        for s in f.sandwiches:
            out.add(("sandwich", tuple(sorted(x.key for x in (s.frontrun, *s.victims, s.backrun)))))
        for liq in f.liquidations:
            out.add(("liquidation", (liq.key,)))
    return out


@pytest.fixture(scope="session")
def corpus50():
    return generate_corpus(50, seed=7)


@pytest.fixture(scope="session")
def corpus50_files(tmp_path_factory, corpus50):
    import yaml

    from l2mev.ingestion.config import chain_config_to_dict

    d = tmp_path_factory.mktemp("corpus50")
    record_corpus_fixture(corpus50, d / "fx.jsonl")
    (d / "chain.yaml").write_text(yaml.safe_dump(chain_config_to_dict(corpus50.config)))
    return d


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
