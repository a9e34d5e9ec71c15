"""scikit-learn style wrappers so the stages compose with ``sklearn.pipeline``.

    >>> from sklearn.pipeline import make_pipeline
    >>> pipe = make_pipeline(LogClassifier(state=reader), MevDetector(), UsdPricer(chain=cfg, state=reader))
    >>> per_block_records = pipe.fit_transform(blocks)
"""
from __future__ import annotations

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.pipeline import Pipeline
from sklearn.utils.validation import check_is_fitted

from .analytics import TABLE_ROWS, aggregate, build_report_from_records, histogram, top_tokens, \
    tx_profits
from .decoder.classify import classify_block
from .decoder.registry import build_registry
from .detector.arbitrage import DEFAULT_MAX_CYCLE_LENGTH
from .detector.inspect import inspect_block
from .ingestion.metadata import PoolMetadataResolver
from .pricing.quotes import PriceOracle
from .pricing.records import price_findings
from .validation import check_blocks, check_classified, check_findings, check_positive_int, check_records


class LogClassifier(BaseEstimator, TransformerMixin):
    """BlockData -> ClassifiedBlock.

    Parameters
    ----------
    state : object with ``call(to, data, block)``, optional
        Contract reader used to resolve pool metadata when ``metadata_source``
        is not given.
    metadata_source : callable, optional
        ``(pool, family, block) -> PoolMetadata | None``.
    registry_extensions : sequence of (signature, family, kind)
    include_default_registry : bool
    """

    def __init__(self, state=None, metadata_source=None, registry_extensions=(), include_default_registry=True):
        self.state = state
        self.metadata_source = metadata_source
        self.registry_extensions = registry_extensions
        self.include_default_registry = include_default_registry

    def fit(self, X=None, y=None):
        if self.metadata_source is None and self.state is None:
            raise ValueError("LogClassifier needs either state or metadata_source")
        self.registry_ = build_registry(self.registry_extensions, self.include_default_registry)
        self.metadata_source_ = self.metadata_source or PoolMetadataResolver(self.state)
        return self

    def transform(self, X):
        check_is_fitted(self, "registry_")
        return [classify_block(b, self.registry_, self.metadata_source_) for b in check_blocks(X, ascending=False)]


class MevDetector(BaseEstimator, TransformerMixin):
    """ClassifiedBlock -> MevFindings (arbitrages, sandwiches, liquidations)."""

    def __init__(self, sandwiches_possible=True, max_cycle_length=DEFAULT_MAX_CYCLE_LENGTH):
        self.sandwiches_possible = sandwiches_possible
        self.max_cycle_length = max_cycle_length

    def fit(self, X=None, y=None):
        self.max_cycle_length_ = check_positive_int(self.max_cycle_length, "max_cycle_length")
        if self.max_cycle_length_ < 2:
            raise ValueError("max_cycle_length must be at least 2")
        return self

    def transform(self, X):
        check_is_fitted(self, "max_cycle_length_")
        return [
            inspect_block(b, sandwiches_possible=self.sandwiches_possible, max_cycle_length=self.max_cycle_length_)
            for b in check_classified(X)
        ]


class UsdPricer(BaseEstimator, TransformerMixin):
    """MevFindings -> list of PricedMevRecord per block (block-pinned USD values)."""

    def __init__(self, chain=None, state=None, native_hop=None):
        self.chain = chain
        self.state = state
        self.native_hop = native_hop

    def fit(self, X=None, y=None):
        if self.chain is None or self.state is None:
            raise ValueError("UsdPricer needs chain and state")
        self.oracle_ = PriceOracle(self.chain, self.state, native_hop=self.native_hop)
        return self

    def transform(self, X):
        check_is_fitted(self, "oracle_")
        return [price_findings(f, self.chain, self.oracle_) for f in check_findings(X)]


class ProfitAggregator(BaseEstimator):
    """Fits the profit tables on priced records.

    ``fit(records, blocks=...)`` takes the ``{block: timestamp}`` map of the
    inspected range (the denominator for the ``all`` universes); when omitted
    only blocks that produced records are counted.
    """

    def __init__(self, histogram_bounds=(100, 10, 1), bucket_count=10, top_n=10):
        self.histogram_bounds = histogram_bounds
        self.bucket_count = bucket_count
        self.top_n = top_n

    def fit(self, X, y=None, blocks=None):
        records = check_records(X)
        check_positive_int(self.bucket_count, "bucket_count")
        check_positive_int(self.top_n, "top_n")
        if blocks is None:
            blocks = {r.block_number: r.timestamp for r in records}
        self.blocks_ = dict(blocks)
        self.stats_ = [aggregate(records, self.blocks_, g, u) for g, u in TABLE_ROWS]
        self.histograms_ = [histogram(tx_profits(records), b, self.bucket_count) for b in self.histogram_bounds]
        self.top_tokens_ = top_tokens(records, self.top_n) if records else []
        self.records_ = records
        return self

    def transform(self, X=None):
        """The six profit rows (block/day/tx × universe) as ``StatsRow`` objects."""
        check_is_fitted(self, "stats_")
        if X is None:
            return list(self.stats_)
        records = check_records(X)
        return [aggregate(records, self.blocks_, g, u) for g, u in TABLE_ROWS]

    def report(self, chain_id=0, block_range=None, **kwargs):
        check_is_fitted(self, "stats_")
        if block_range is None:
            block_range = (min(self.blocks_), max(self.blocks_)) if self.blocks_ else (0, -1)
        return build_report_from_records(self.records_, self.blocks_, chain_id, block_range,
                                         histogram_bounds=self.histogram_bounds, bucket_count=self.bucket_count,
                                         top_n=self.top_n, **kwargs)


def make_inspector(chain, state, **kwargs) -> Pipeline:
    """Classifier -> detector -> pricer pipeline configured from a ChainConfig."""
    return Pipeline([
        ("classify", LogClassifier(state=state, registry_extensions=chain.registry_extensions)),
        ("detect", MevDetector(sandwiches_possible=chain.sandwiches_possible,
                               max_cycle_length=kwargs.get("max_cycle_length", DEFAULT_MAX_CYCLE_LENGTH))),
        ("price", UsdPricer(chain=chain, state=state, native_hop=kwargs.get("native_hop"))),
    ])
