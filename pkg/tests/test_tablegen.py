import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apack import synth, tablegen
from apack.codetable import CodeTable, Histogram, validate
from apack.coder import encode_stream
from apack.errors import EmptyHistogram
from apack.tablegen import SearchConfig

from conftest import REF_HIGH, REF_P, REF_VMIN

UNIFORM = tablegen.uniform_partition()


def hist_of(mapping):
    b = np.zeros(256, dtype=np.uint64)
    for v, n in mapping.items():
        b[v] = n
    return Histogram(b)


def brute_encoded_size(h, v_mins):
    """Per-value sum straight from the definition."""
    ends = list(v_mins[1:]) + [256]
    total = h.total
    bits = 0.0
    for lo, hi in zip(v_mins, ends):
        n = sum(h[v] for v in range(lo, hi))
        if n:
            bits += n * (-math.log2(n / total) + (hi - 1 - lo).bit_length())
    return bits


random_hists = st.lists(st.integers(0, 1000), min_size=256, max_size=256).filter(lambda b: sum(b) > 0).map(Histogram)


def test_uniform_partition():
    assert UNIFORM == tuple(range(0, 256, 16))


def test_encoded_size_uniform():
    h = Histogram([7] * 256)
    assert tablegen.encoded_size(h, UNIFORM) == pytest.approx(8.0 * h.total, rel=1e-12)


def test_encoded_size_single_value():
    h = hist_of({0: 1000})
    assert tablegen.encoded_size(h, (0,) + tuple(range(1, 16))) == 0.0


def test_encoded_size_fair_bit():
    h = hist_of({0: 500, 255: 500})
    v_mins = (0, 1) + tuple(range(16, 209, 16)) + (255,)
    assert len(v_mins) == 16
    assert tablegen.encoded_size(h, v_mins) == pytest.approx(1.0 * h.total, rel=1e-12)


def test_encoded_size_empty():
    with pytest.raises(EmptyHistogram):
        tablegen.encoded_size(Histogram(np.zeros(256)), UNIFORM)


@settings(max_examples=50, deadline=None)
@given(random_hists, st.integers(0, 2**32 - 1))
def test_encoded_size_matches_definition(h, seed):
    rng = np.random.default_rng(seed)
    v_mins = (0,) + tuple(sorted(rng.choice(np.arange(1, 256), 15, replace=False).tolist()))
    assert tablegen.encoded_size(h, v_mins) == pytest.approx(brute_encoded_size(h, v_mins), rel=1e-9, abs=1e-6)


def test_search_improves_point_mass():
    h = hist_of({0: 1000})
    size = tablegen.encoded_size(h, UNIFORM)
    assert size == pytest.approx(4000.0)
    part, new = tablegen.search(h, UNIFORM, size)
    assert new < size
    assert part[1] == 1 and new == 0.0


def test_search_keeps_optimal_partition():
    h = Histogram([3] * 256)
    size = tablegen.encoded_size(h, UNIFORM)
    assert tablegen.search(h, UNIFORM, size) == (UNIFORM, size)


def _moves(v, i):
    prev = v[i - 1]
    nxt = v[i + 1] if i < 15 else 256
    return [p for p in range(prev + 1, nxt) if p != v[i]]


def brute_single_moves(h, v):
    best = math.inf
    for i in range(1, 16):
        for p in _moves(v, i):
            w = list(v)
            w[i] = p
            best = min(best, brute_encoded_size(h, w))
    return best


def brute_pair_moves(h, v):
    """Row i moved, then one of its neighbours moved; the lone move is not scored."""
    best = math.inf
    for i in range(1, 16):
        for p in _moves(v, i):
            w = list(v)
            w[i] = p
            for j in (i - 1, i + 1):
                if 1 <= j <= 15:
                    for q in _moves(w, j):
                        u = list(w)
                        u[j] = q
                        best = min(best, brute_encoded_size(h, u))
    return best


@pytest.mark.parametrize("seed", range(5))
def test_search_depth1_is_best_single_move(seed):
    rng = np.random.default_rng(seed)
    h = Histogram(rng.integers(0, 50, 256) * (rng.random(256) < 0.3))
    start = tablegen.encoded_size(h, UNIFORM)
    _, size = tablegen.search(h, UNIFORM, start, cfg=SearchConfig(depth_max=1))
    assert size == pytest.approx(min(start, brute_single_moves(h, UNIFORM)), rel=1e-9)


@pytest.mark.parametrize("seed", range(2))
def test_search_depth2_is_best_pair_move(seed):
    rng = np.random.default_rng(10 + seed)
    v = (0,) + tuple(sorted(rng.choice(np.arange(1, 256), 15, replace=False).tolist()))
    h = Histogram(rng.integers(0, 50, 256) * (rng.random(256) < 0.3))
    start = tablegen.encoded_size(h, v)
    _, size = tablegen.search(h, v, start)
    assert size == pytest.approx(min(start, brute_pair_moves(h, v)), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(random_hists)
def test_search_never_worse(h):
    size = tablegen.encoded_size(h, UNIFORM)
    part, new = tablegen.search(h, UNIFORM, size)
    assert new <= size
    assert tablegen.encoded_size(h, part) == pytest.approx(new, rel=1e-9, abs=1e-9)


def test_find_partition_uniform():
    assert tablegen.find_partition(Histogram([11] * 256)) == UNIFORM


def test_find_partition_point_mass():
    steps = list(tablegen.iter_partitions(hist_of({0: 4096})))
    assert steps[-1][1] <= 0.01 * steps[0][1]


def test_find_partition_two_clusters():
    p = synth.two_cluster_probs(0.5, 4)
    h = Histogram(np.round(p * 1_000_000).astype(np.uint64))
    steps = list(tablegen.iter_partitions(h))
    sizes = [s for _, s in steps]
    assert all(b <= a for a, b in zip(sizes, sizes[1:]))
    assert sizes[-1] / h.total <= 4.0


def test_find_partition_empty():
    with pytest.raises(EmptyHistogram):
        tablegen.find_partition(Histogram(np.zeros(256)))


def test_search_config_bounds():
    with pytest.raises(ValueError):
        SearchConfig(depth_max=0)
    with pytest.raises(ValueError):
        SearchConfig(threshold=1.0)


# --- counts -------------------------------------------------------------------


def _ref_table_p_histogram():
    weights = {}
    for r, p in enumerate(REF_P):
        weights[REF_VMIN[r]] = round(p * 10_000)
    return hist_of(weights)


def test_assign_counts_reproduces_ref_table_from_p_column():
    table = tablegen.assign_counts(_ref_table_p_histogram(), REF_VMIN, is_weights=True)
    assert list(table.c_hi) == REF_HIGH


def test_assign_counts_reproduces_ref_table_from_counts():
    counts = np.diff([0] + REF_HIGH)
    h = hist_of({v: int(c) * 37 for v, c in zip(REF_VMIN, counts)})
    assert list(tablegen.assign_counts(h, REF_VMIN).c_hi) == REF_HIGH


def test_assign_counts_single_range():
    table = tablegen.assign_counts(hist_of({70: 5}), UNIFORM, is_weights=True)
    assert table.counts[4] == 1023 and sum(table.counts) == 1023
    assert table.c_hi == (0,) * 4 + (1023,) * 12


def test_assign_counts_tie_goes_to_lower_row():
    table = tablegen.assign_counts(hist_of({20: 8, 200: 8}), UNIFORM, is_weights=True)
    assert table.counts[1] == 512 and table.counts[12] == 511


def test_assign_counts_keeps_rare_ranges():
    h = hist_of({0: 10**9, 100: 1, 200: 1})
    table = tablegen.assign_counts(h, UNIFORM)
    assert table.counts[6] == 1 and table.counts[12] == 1 and table.counts[0] == 1021


@settings(max_examples=100, deadline=None)
@given(random_hists, st.booleans())
def test_assign_counts_valid(h, weights):
    table = tablegen.assign_counts(h, UNIFORM, is_weights=weights)
    validate(table)
    assert sum(table.counts) == 1023
    for v in range(256):
        if h[v]:
            assert table.covers(v)
    if not weights:
        assert min(table.counts) >= 1


def test_adjust_ref_table():
    table = CodeTable.from_arrays(REF_VMIN, REF_HIGH)
    adj = tablegen.adjust_for_activations(table)
    # 491 stays the running maximum through all nine steals
    assert adj.counts == (482, 62, 15, 2) + (1,) * 9 + (2, 58, 393)
    validate(adj)


def test_adjust_single_row():
    adj = tablegen.adjust_for_activations(CodeTable.from_counts(UNIFORM, [0] * 7 + [1023] + [0] * 8))
    assert adj.counts == (1,) * 7 + (1008,) + (1,) * 8


def test_adjust_noop():
    table = CodeTable.from_counts(UNIFORM, [63] * 15 + [78])
    assert tablegen.adjust_for_activations(table) == table


@settings(max_examples=100, deadline=None)
@given(random_hists)
def test_adjust_never_zeroes_a_row(h):
    table = tablegen.assign_counts(h, UNIFORM, is_weights=True)
    adj = tablegen.adjust_for_activations(table)
    assert all(c >= 1 for c in adj.counts) and sum(adj.counts) == 1023
    for before, after in zip(table.counts, adj.counts):
        assert before == 0 or after >= 1


@pytest.mark.parametrize("spec", ["two-cluster:0.5,4", "two-cluster:0.3,16,0.1", "sparse:0.8", "uniform"])
def test_estimate_tracks_actual_size(spec):
    data = synth.generate(spec, 60_000, seed=5)
    h = Histogram.from_values(data)
    table = tablegen.build_table(h)
    estimate = tablegen.table_cross_entropy(h, table)
    enc = encode_stream(data, table)
    actual = enc.symbol_bits + enc.offset_bits
    assert abs(actual - estimate) <= 0.05 * estimate + 64
