import itertools
import random
import struct

import pytest
from hypothesis import given, settings

from abtcore.decomposition import decompose, decompose_optimized
from abtcore.graph import BipartiteGraph, complete_bipartite
from abtcore.index import (
    Chain,
    TotalIndex,
    build_2d_index,
    build_index,
    build_total_index,
    query,
    query_total,
    query_via_2d,
    seed_nodes,
)
from abtcore.peeling import online_core
from abtcore.serialize import (
    IndexFormatError,
    IndexMismatchError,
    deserialize_index,
    load_index,
    save_index,
    serialize_index,
)

import oracles
from conftest import bipartite_graphs

KINDS = ("total", "ab", "bt", "at")


def test_chain_pointers_reference_smallest_key_at_least_t():
    ch = Chain.from_levels({0: 1, 1: 3, 2: 3, 3: 6})
    assert ch.keys == [1, 3, 6]
    assert ch.ptr == [0, 1, 1, 2, 2, 2]
    assert ch.collect(4) == [3] and ch.collect(7) == []


def test_demo_blocks(demo):
    idx = build_total_index(decompose(demo))
    ch = idx.levels[0][1]
    assert list(ch.walk(1))[0] == (1, (0, 6, 7))
    assert list(ch.walk(1))[1] == (2, tuple(x for x in range(13) if x not in (0, 6, 7)))
    c = query_total(idx, 1, 2, 1, demo)
    assert c.upper == set(range(6)) and c.lower == set(range(7))


def test_k22_one_block_per_chain():
    idx = build_total_index(decompose(complete_bipartite(2, 2)))
    for row in idx.levels:
        for ch in row:
            assert ch.keys == [1] and ch.blocks == [(0, 1, 2, 3)]


def test_empty_graph_empty_index():
    g = BipartiteGraph(0, 0, [])
    idx = build_total_index(decompose(g))
    assert idx.levels == []
    assert not query_total(idx, 1, 1, 1, g)


def test_out_of_range_is_empty(demo):
    idx = build_index(demo, "total")
    assert not query_total(idx, 1, 1, 3, demo)
    assert not query_total(idx, 9, 1, 1, demo)
    assert not query_total(idx, 1, 9, 1, demo)


def test_bt_is_alpha1_slice_of_total(demo):
    total = build_index(demo, "total")
    bt = build_2d_index(demo, "bt")
    assert bt.chains == total.levels[0]


def test_k33_ab_upper_table():
    g = complete_bipartite(3, 3)
    ab = build_2d_index(g, "ab")
    for a in (1, 2, 3):
        assert ab.chains[a - 1].collect(3) == [0, 1, 2]
    assert len(ab.chains) == 3 and len(ab.lower_chains) == 3


def test_single_edge_bt_empty():
    g = complete_bipartite(1, 1)
    bt = build_2d_index(g, "bt")
    assert bt.chains == []
    for t in (1, 2, 3):
        assert not query_via_2d(bt, 1, 1, t, g)


def test_unknown_kind():
    with pytest.raises(ValueError):
        build_2d_index(complete_bipartite(2, 2), "xy")


def test_demo_bt_seed_then_peel(demo):
    bt = build_2d_index(demo, "bt")
    seed = set(seed_nodes(bt, 2, 2, 2))
    assert seed == online_core(demo, 1, 2, 2).nodes(demo)
    c = query_via_2d(bt, 2, 2, 2, demo)
    assert c.upper == {1, 2, 3, 4, 5} and c.lower == {2, 3, 4, 5, 6}


def test_ab_tau0_is_the_seed(demo):
    ab = build_2d_index(demo, "ab")
    for a, b in itertools.product(range(1, 5), repeat=2):
        assert set(seed_nodes(ab, a, b, 0)) == online_core(demo, a, b, 0).nodes(demo)
        assert query_via_2d(ab, a, b, 0, demo) == online_core(demo, a, b, 0)


def _all_params(top=5, ttop=7):
    return itertools.product(range(1, top + 1), range(1, top + 1), range(0, ttop + 1))


@settings(max_examples=40, deadline=None)
@given(bipartite_graphs(max_side=7, max_edges=30))
def test_five_way_equivalence(g):
    idx = {k: build_index(g, k) for k in KINDS}
    for a, b, t in _all_params():
        ref = online_core(g, a, b, t)
        for k in KINDS:
            assert query(idx[k], a, b, t, g, idx["ab"]) == ref, (k, a, b, t)
        # no AB helper: tau = 0 falls back to online peeling
        assert query(idx["bt"], a, b, t, g) == ref


@settings(max_examples=30, deadline=None)
@given(bipartite_graphs(max_side=7, max_edges=30))
def test_chain_walk_counts_and_partition(g):
    d = decompose_optimized(g)
    idx = build_total_index(d)
    for a, row in enumerate(idx.levels, start=1):
        for b, ch in enumerate(row, start=1):
            members = [x for blk in ch.blocks for x in blk]
            assert len(members) == len(set(members))
            assert set(members) == online_core(g, a, b, 1).nodes(g)
            assert all(k1 < k2 for k1, k2 in zip(ch.keys, ch.keys[1:]))
            for t in range(1, ch.depth + 2):
                assert len(ch.collect(t)) == len(online_core(g, a, b, t).nodes(g))


def test_space_bound():
    # sum over (alpha, beta) of n, plus the tau-level pointers
    g = oracles.random_graph(5, max_side=12, max_edges=70)
    d = decompose(g)
    idx = build_total_index(d)
    bound = sum(g.n + d.tau_max_of(a, b) + 1 for (a, b) in d.tau_max)
    assert idx.size_cells() <= 2 * bound


# -- serialization -----------------------------------------------------------


@pytest.mark.parametrize("kind", KINDS)
def test_round_trip_queries(kind):
    g = oracles.random_graph(9, max_side=14, max_edges=90)
    idx = build_index(g, kind)
    ab = build_index(g, "ab")
    back = deserialize_index(serialize_index(idx, g), g)
    assert back == idx
    r = random.Random(1)
    for _ in range(100):
        a, b, t = r.randint(1, 6), r.randint(1, 6), r.randint(1, 8)
        assert query(back, a, b, t, g, ab) == query(idx, a, b, t, g, ab)


@pytest.mark.parametrize("kind", KINDS)
def test_truncated_stream_rejected(kind, demo):
    blob = serialize_index(build_index(demo, kind), demo)
    for cut in range(len(blob)):
        with pytest.raises(IndexFormatError):
            deserialize_index(blob[:cut], demo)


def test_checksum_mismatch(demo):
    blob = serialize_index(build_index(demo, "total"), demo)
    with pytest.raises(IndexMismatchError):
        deserialize_index(blob, complete_bipartite(2, 2))


def test_version_mismatch(demo):
    blob = bytearray(serialize_index(build_index(demo, "bt"), demo))
    struct.pack_into("<H", blob, 4, 99)
    with pytest.raises(IndexMismatchError):
        deserialize_index(bytes(blob), demo)


def test_bad_magic(demo):
    blob = b"XXXX" + serialize_index(build_index(demo, "at"), demo)[4:]
    with pytest.raises(IndexFormatError):
        deserialize_index(blob)


def test_save_and_load(tmp_path, demo):
    idx = build_index(demo, "ab")
    p = tmp_path / "ab.bcix"
    size = save_index(idx, demo, p)
    assert size == p.stat().st_size
    assert load_index(p, demo) == idx
