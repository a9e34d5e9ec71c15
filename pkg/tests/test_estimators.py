import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from l2mev.estimators import LogClassifier, MevDetector, ProfitAggregator, UsdPricer, make_inspector
from l2mev.pipeline import run_inspection
from l2mev.validation import check_blocks
from conftest import finding_keys, manifest_keys


def test_params_round_trip():
    det = MevDetector(sandwiches_possible=False, max_cycle_length=4)
    assert det.get_params() == {"sandwiches_possible": False, "max_cycle_length": 4}
    assert clone(det).set_params(max_cycle_length=6).max_cycle_length == 6
    assert set(ProfitAggregator().get_params()) == {"histogram_bounds", "bucket_count", "top_n"}


def test_pipeline_matches_functional_run(corpus50):
    pipe = make_inspector(corpus50.config, corpus50.chain)
    per_block = pipe.fit_transform(corpus50.blocks)
    assert len(per_block) == 50
    ref = []
    run_inspection(corpus50.config, corpus50.blocks, corpus50.chain, on_block=lambda b, f, r: ref.extend(r))
    assert [r for recs in per_block for r in recs] == ref


def test_detector_stage_finds_manifest(corpus50):
    stages = make_pipeline(LogClassifier(state=corpus50.chain), MevDetector())
    assert finding_keys(stages.fit_transform(corpus50.blocks)) == manifest_keys(corpus50.manifest)


def test_aggregator_fit_report(corpus50):
    recs = make_inspector(corpus50.config, corpus50.chain).fit_transform(corpus50.blocks)
    agg = ProfitAggregator(top_n=3).fit(recs, blocks={b.number: b.timestamp for b in corpus50.blocks})
    assert len(agg.stats_) == 6 and len(agg.top_tokens_) == 3 and len(agg.histograms_) == 3
    assert agg.transform() == agg.stats_
    assert agg.report(chain_id=137).blocks_inspected == 50


def test_unfitted_transform_raises(corpus50):
    with pytest.raises(NotFittedError):
        MevDetector().transform([])
    with pytest.raises(NotFittedError):
        UsdPricer(chain=corpus50.config, state=corpus50.chain).transform([])


@pytest.mark.parametrize("bad", [0, -1, 1.5, True])
def test_invalid_cycle_length(bad):
    with pytest.raises(ValueError):
        MevDetector(max_cycle_length=bad).fit()


def test_classifier_requires_state():
    with pytest.raises(ValueError):
        LogClassifier().fit()


def test_input_validation(corpus50):
    clf = LogClassifier(state=corpus50.chain).fit()
    with pytest.raises(TypeError):
        clf.transform([1, 2])
    with pytest.raises(ValueError):
        check_blocks([corpus50.blocks[1], corpus50.blocks[0]])
    with pytest.raises(ValueError):
        check_blocks([corpus50.blocks[0], corpus50.blocks[0]], ascending=False)
    with pytest.raises(TypeError):
        MevDetector().fit().transform(corpus50.blocks[:1])
