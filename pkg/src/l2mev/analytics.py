"""Profit statistics: mean/median tables, histograms, top tokens and the full report."""
from __future__ import annotations

import csv
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .pricing.ammmath import to_decimal
from .pricing.records import KINDS, PricedMevRecord, utc_day
from .storage import CoverageGap, MevStore, missing_intervals

GRANULARITIES = ("block", "day", "tx")
UNIVERSES = ("all", "with_mev", "strictly_positive_tx")
# the six "profit by" rows, in table order
TABLE_ROWS = (
    ("block", "all"), ("block", "with_mev"),
    ("day", "all"), ("day", "with_mev"),
    ("tx", "all"), ("tx", "strictly_positive_tx"),
)
STATS_HEADER = ("granularity", "universe", "median", "mean", "count_basis")
HISTOGRAM_HEADER = ("lower", "upper", "count")
TOKENS_HEADER = ("token", "count", "frequency_pct")
MEAN_PRECISION = 28
LOWER_BOUND_NOTE = (
    "Totals are a lower bound: {n} finding(s) in tokens without a USDC or native-token "
    "pool are counted in transaction and token tables but contribute $0."
)


@dataclass(frozen=True)
class StatsRow:
    granularity: str
    universe: str
    median: Optional[Decimal]
    mean: Optional[Decimal]
    count_basis: int


@dataclass(frozen=True)
class Histogram:
    upper_bound: Decimal
    buckets: tuple
    coverage_note: Decimal
    excluded_negative: int = 0


@dataclass(frozen=True)
class TokenFrequencyRow:
    token: str
    count: int
    frequency_pct: Decimal


def _usd(r) -> Decimal:
    if isinstance(r, PricedMevRecord):
        return r.usd_or_zero
    return Decimal(r)


def period_values(records: Iterable[PricedMevRecord], blocks: Mapping[int, int], granularity: str) -> tuple:
    """Per-period USD totals: (values of every period in range, values of periods with MEV)."""
    records = list(records)
    if granularity == "tx":
        totals: dict = defaultdict(Decimal)
        for r in records:
            totals[r.tx_hash] += r.usd_or_zero
        vals = list(totals.values())
        return vals, vals
    key = (lambda r: r.block_number) if granularity == "block" else (lambda r: utc_day(r.timestamp))
    with_mev: dict = defaultdict(Decimal)
    for r in records:
        with_mev[key(r)] += r.usd_or_zero
    if granularity == "block":
        periods = set(blocks)
    else:
        periods = {utc_day(ts) for ts in blocks.values()}
    periods |= set(with_mev)
    return [with_mev.get(p, Decimal(0)) for p in periods], list(with_mev.values())


def lower_median(values: Sequence[Decimal]) -> Decimal:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def aggregate(records: Iterable[PricedMevRecord], blocks: Mapping[int, int], granularity: str,
              universe: str) -> StatsRow:
    """Median and mean USD profit per period.

    ``blocks`` maps every inspected block number to its timestamp and defines
    the ``all`` universe; periods without MEV count as zero there. Even-sized
    sets use the lower-middle element as median.
    """
    if granularity not in GRANULARITIES or universe not in UNIVERSES:
        raise ValueError(f"unknown granularity/universe {granularity}/{universe}")
    if universe == "strictly_positive_tx" and granularity != "tx":
        raise ValueError("strictly_positive_tx applies only to tx granularity")
    everything, mev_only = period_values(records, blocks, granularity)
    if universe == "all":
        values = everything
    elif universe == "with_mev":
        values = mev_only
    else:
        values = [v for v in mev_only if v > 0]
    if not values:
        return StatsRow(granularity, universe, None, None, 0)
    mean = to_decimal(Fraction(sum(values, Decimal(0))) / len(values), MEAN_PRECISION)
    return StatsRow(granularity, universe, lower_median(values), mean, len(values))


def histogram(records: Iterable, filter_upper, bucket_count: int = 10) -> Histogram:
    """Equal-width buckets over ``[0, filter_upper]``; the last bucket is closed.

    Unpriced records are skipped entirely. Negative values stay out of the
    buckets but count in the denominator of ``coverage_note``.
    """
    upper = Fraction(Decimal(str(filter_upper)))
    if upper <= 0 or bucket_count < 1:
        raise ValueError("filter_upper must be > 0 and bucket_count >= 1")
    counts = [0] * bucket_count
    total = negative = 0
    for r in records:
        if isinstance(r, PricedMevRecord) and r.usd_profit is None:
            continue
        v = Fraction(_usd(r))
        total += 1
        if v < 0:
            negative += 1
            continue
        if v > upper:
            continue
        counts[min(int(v * bucket_count / upper), bucket_count - 1)] += 1
    width = upper / bucket_count
    buckets = tuple(
        (to_decimal(width * i).normalize(), to_decimal(width * (i + 1)).normalize(), counts[i])
        for i in range(bucket_count)
    )
    coverage = Decimal(0) if total == 0 else to_decimal(Fraction(sum(counts), total))
    return Histogram(Decimal(str(filter_upper)), buckets,
                     coverage.quantize(Decimal("1e-6"), ROUND_HALF_EVEN), negative)


def top_tokens(records: Iterable[PricedMevRecord], n: int = 10) -> list:
    if n < 1:
        raise ValueError("n must be >= 1")
    counts = Counter(r.profit_token for r in records)
    total = sum(counts.values())
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:n]
    return [
        TokenFrequencyRow(token, count, (Decimal(count * 100) / Decimal(total)).quantize(Decimal("0.01"),
                                                                                          ROUND_HALF_EVEN))
        for token, count in ranked
    ]


@dataclass
class AggregateReport:
    chain_id: int
    block_range: tuple
    total_usd_profit: Decimal
    total_mev_tx_count: int
    kinds: dict
    stats: list
    histograms: list
    top_tokens: list
    unpriced_count: int
    blocks_inspected: int
    diagnostics: dict = field(default_factory=dict)
    token_labels: dict = field(default_factory=dict)
    reference_totals: dict = field(default_factory=dict)

    @property
    def lower_bound_note(self) -> str:
        return LOWER_BOUND_NOTE.format(n=self.unpriced_count)

    def as_dict(self) -> dict:
        def dec(v):
            return None if v is None else format(v, "f")

        return {
            "chain_id": self.chain_id,
            "block_range": list(self.block_range),
            "blocks_inspected": self.blocks_inspected,
            "total_usd_profit": dec(self.total_usd_profit),
            "total_mev_tx_count": self.total_mev_tx_count,
            "kinds": {k: {"count": v["count"], "usd": dec(v["usd"]), "unpriced": v["unpriced"],
                          "share_pct": dec(v["share_pct"])} for k, v in self.kinds.items()},
            "stats": [{"granularity": s.granularity, "universe": s.universe, "median": dec(s.median),
                       "mean": dec(s.mean), "count_basis": s.count_basis} for s in self.stats],
            "histograms": [{"upper_bound": dec(h.upper_bound), "coverage_note": dec(h.coverage_note),
                            "excluded_negative": h.excluded_negative,
                            "buckets": [[dec(lo), dec(hi), c] for lo, hi, c in h.buckets]}
                           for h in self.histograms],
            "top_tokens": [{"token": t.token, "label": self.token_labels.get(t.token, t.token),
                            "count": t.count, "frequency_pct": dec(t.frequency_pct)} for t in self.top_tokens],
            "unpriced_count": self.unpriced_count,
            "lower_bound_note": self.lower_bound_note,
            "diagnostics": self.diagnostics,
            "reference_totals": self.reference_totals,
        }


def tx_profits(records: Iterable[PricedMevRecord]) -> list:
    """USD profit per MEV transaction, over transactions with at least one priced finding."""
    totals: dict = {}
    for r in records:
        if r.priced:
            totals[r.tx_hash] = totals.get(r.tx_hash, Decimal(0)) + r.usd_profit
    return list(totals.values())


def _sum_diagnostics(per_block: Mapping[int, dict]) -> dict:
    out: dict = {}
    pools: set = set()
    for diag in per_block.values():
        for k, v in diag.items():
            if k == "unresolved_pools":
                pools.update(v)
            else:
                out[k] = out.get(k, 0) + v
    out["unresolved_pools"] = len(pools)
    return dict(sorted(out.items()))


def build_report_from_records(records: Sequence[PricedMevRecord], blocks: Mapping[int, int], chain_id: int,
                              block_range: tuple, *, histogram_bounds=(100, 10, 1), bucket_count: int = 10,
                              top_n: int = 10, token_labels: Optional[dict] = None,
                              reference_totals: Optional[dict] = None, diagnostics: Optional[dict] = None
                              ) -> AggregateReport:
    records = sorted(records, key=lambda r: (r.block_number, r.tx_index, r.ordinal))
    total = sum((r.usd_profit for r in records if r.priced), Decimal(0))
    kinds = {}
    for kind in KINDS:
        subset = [r for r in records if r.kind == kind]
        kinds[kind] = {
            "count": len(subset),
            "usd": sum((r.usd_profit for r in subset if r.priced), Decimal(0)),
            "unpriced": sum(1 for r in subset if not r.priced),
        }
    kinds["combined"] = {
        "count": len(records),
        "usd": total,
        "unpriced": sum(1 for r in records if not r.priced),
    }
    for v in kinds.values():
        v["share_pct"] = (Decimal(v["count"] * 100) / Decimal(len(records))).quantize(Decimal("0.01")) \
            if records else Decimal("0.00")
    histograms = [histogram(tx_profits(records), b, bucket_count) for b in histogram_bounds]
    return AggregateReport(
        chain_id=chain_id,
        block_range=tuple(block_range),
        total_usd_profit=total,
        total_mev_tx_count=len({r.tx_hash for r in records}),
        kinds=kinds,
        stats=[aggregate(records, blocks, g, u) for g, u in TABLE_ROWS],
        histograms=histograms,
        top_tokens=top_tokens(records, top_n) if records else [],
        unpriced_count=kinds["combined"]["unpriced"],
        blocks_inspected=len(blocks),
        diagnostics=diagnostics or {},
        token_labels=dict(token_labels or {}),
        reference_totals=dict(reference_totals or {}),
    )


def build_report(store: MevStore, chain_id: int, block_range: tuple, **kwargs) -> AggregateReport:
    """Report over ``[from, to]``; raises :class:`CoverageGap` if any block was never inspected."""
    start, stop = block_range
    records, coverage = store.query_range(chain_id, start, stop)
    gaps = missing_intervals(coverage, start, stop)
    if gaps:
        raise CoverageGap(gaps)
    diagnostics = _sum_diagnostics(store.diagnostics(chain_id, start, stop))
    return build_report_from_records(records, coverage, chain_id, block_range, diagnostics=diagnostics, **kwargs)


def _fmt(v) -> str:
    return "" if v is None else format(v, "f")


def _bound_name(bound: Decimal) -> str:
    return format(bound.normalize(), "f")


def write_report(report: AggregateReport, out_dir) -> list:
    """Emit report.json, report.txt and one CSV per table; returns written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def table(name, header, rows):
        path = out / name
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        written.append(path)

    table("stats.csv", STATS_HEADER,
          [(s.granularity, s.universe, _fmt(s.median), _fmt(s.mean), s.count_basis) for s in report.stats])
    for h in report.histograms:
        table(f"histogram_le_{_bound_name(h.upper_bound)}.csv", HISTOGRAM_HEADER,
              [(_fmt(lo), _fmt(hi), c) for lo, hi, c in h.buckets])
    table("top_tokens.csv", TOKENS_HEADER, [(t.token, t.count, _fmt(t.frequency_pct)) for t in report.top_tokens])

    path = out / "report.json"
    path.write_text(json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    written.append(path)
    path = out / "report.txt"
    path.write_text(render_text(report), encoding="utf-8")
    written.append(path)
    return written


_ROW_LABELS = {
    ("block", "all"): "Block",
    ("block", "with_mev"): "Block with MEV",
    ("day", "all"): "Date",
    ("day", "with_mev"): "Date with MEV",
    ("tx", "all"): "MEV Tx",
    ("tx", "strictly_positive_tx"): "MEV Tx with strictly positive profit",
}


def render_text(report: AggregateReport) -> str:
    lines = [
        f"MEV report: chain {report.chain_id}, blocks {report.block_range[0]}-{report.block_range[1]}"
        f" ({report.blocks_inspected} inspected)",
        "",
        f"Total profit (USD): {_fmt(report.total_usd_profit)}",
        f"MEV transactions: {report.total_mev_tx_count}",
        report.lower_bound_note,
        "",
        "By kind:",
    ]
    for kind, v in report.kinds.items():
        lines.append(f"  {kind:<12} count={v['count']:<8} share={_fmt(v['share_pct'])}%"
                     f"  usd={_fmt(v['usd'])}  unpriced={v['unpriced']}")
    lines += ["", "Median and mean profit (USD):"]
    for s in report.stats:
        label = _ROW_LABELS[(s.granularity, s.universe)]
        lines.append(f"  {label:<38} median={_fmt(s.median) or '-':>16}  mean={_fmt(s.mean) or '-':>20}"
                     f"  n={s.count_basis}")
    for h in report.histograms:
        lines += ["", f"Profit distribution (<= ${_bound_name(h.upper_bound)}), coverage {_fmt(h.coverage_note)}:"]
        for lo, hi, c in h.buckets:
            lines.append(f"  [{_fmt(lo)}, {_fmt(hi)}]  {c}")
    lines += ["", "Top tokens profit was taken in:"]
    for t in report.top_tokens:
        lines.append(f"  {report.token_labels.get(t.token, t.token):<44} {t.count:>10} {_fmt(t.frequency_pct):>7}%")
    if report.reference_totals:
        lines += ["", "Total profit (M $) to date by chain (reference figures supplied by user):"]
        own = report.total_usd_profit / Decimal(1_000_000)
        lines.append(f"  {'this run (chain ' + str(report.chain_id) + ')':<30} {_fmt(own.quantize(Decimal('0.000001')))}")
        for name, value in sorted(report.reference_totals.items()):
            lines.append(f"  {name:<30} {value}")
    if report.diagnostics:
        lines += ["", "Diagnostics:"]
        for k, v in report.diagnostics.items():
            lines.append(f"  {k}: {v}")
    return "\n".join(lines) + "\n"
