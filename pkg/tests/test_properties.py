from decimal import Decimal
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from l2mev.abi import word_int, encode_int, encode_uint, word_uint
from l2mev.analytics import TABLE_ROWS, aggregate, histogram
from l2mev.detector import detect_arbitrages
from l2mev.pricing import spot_price_v2, spot_price_v3
from conftest import addr, record, swap
from oracles import brute_force_arbitrages, reference_rows

TOKENS = [addr(i) for i in range(1, 5)]
POOLS = [addr(0x100 + i) for i in range(3)]

swap_spec = st.tuples(st.sampled_from(POOLS), st.permutations(TOKENS), st.integers(1, 10 ** 30),
                      st.integers(1, 10 ** 30))


@settings(max_examples=300, deadline=None)
@given(st.lists(swap_spec, max_size=6))
def test_arbitrage_equals_brute_force(specs):
    swaps = [swap(p, toks[0], toks[1], a, b, i) for i, (p, toks, a, b) in enumerate(specs)]
    arbs = detect_arbitrages(swaps)
    assert [tuple(s.key for s in a.path) for a in arbs] == brute_force_arbitrages(swaps)
    for a in arbs:
        assert a.profit_raw == a.path[-1].amount_out - a.path[0].amount_in
    keys = [s.key for a in arbs for s in a.path]
    assert len(keys) == len(set(keys))


@given(st.integers(1, 2 ** 112), st.integers(1, 2 ** 112), st.integers(0, 24), st.integers(0, 24))
def test_v2_price_inverts_with_swapped_reserves(r0, r1, d0, d1):
    p = Fraction(spot_price_v2(r0, r1, d0, d1))
    q = Fraction(spot_price_v2(r1, r0, d1, d0))
    assert abs(p * q - 1) < Fraction(1, 10 ** 40)


@given(st.integers(1, 2 ** 160 - 1), st.integers(0, 24))
def test_v3_equal_decimals_is_inverse_square(s, d):
    exact = Fraction(2 ** 192, s * s)
    assert abs(Fraction(spot_price_v3(s, d, d)) - exact) <= exact / 10 ** 45


@given(st.integers(0, 2 ** 256 - 1))
def test_uint_word_round_trip(v):
    assert word_uint(encode_uint(v)) == v


@given(st.integers(-2 ** 255, 2 ** 255 - 1))
def test_int_word_round_trip(v):
    assert word_int(encode_int(v)) == v


usd = st.one_of(st.none(), st.decimals(min_value=-1000, max_value=100000, places=6, allow_nan=False,
                                       allow_infinity=False))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 20), st.integers(0, 3), usd), max_size=40))
def test_aggregation_matches_reference(items):
    recs, seen = [], set()
    for block, txi, value in items:
        if (block, txi) in seen:
            continue
        seen.add((block, txi))
        recs.append(record(block=block, ts=1_700_000_000 + block * 20_000, tx=f"0x{block}_{txi}", tx_index=txi,
                           usd=None if value is None else str(value)))
    blocks = {n: 1_700_000_000 + n * 20_000 for n in range(1, 21)}
    ref = reference_rows(recs, blocks)
    for g, u in TABLE_ROWS:
        row = aggregate(recs, blocks, g, u)
        median, mean, count = ref[(g, u)]
        assert row.count_basis == count
        if count:
            assert Fraction(row.median) == median
            assert abs(Fraction(row.mean) - mean) <= abs(mean) / 10 ** 9


@given(st.lists(st.decimals(min_value=-50, max_value=200, places=3, allow_nan=False, allow_infinity=False)),
       st.sampled_from([1, 10, 100]), st.integers(1, 12))
def test_histogram_conserves_values(values, upper, buckets):
    h = histogram(values, upper, buckets)
    inside = [v for v in values if 0 <= v <= upper]
    assert sum(c for *_, c in h.buckets) == len(inside)
    assert h.excluded_negative == sum(1 for v in values if v < 0)
    if values:
        assert h.coverage_note == (Decimal(len(inside)) / Decimal(len(values))).quantize(Decimal("1e-6"))
