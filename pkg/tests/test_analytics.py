import io
import math

import pytest
from hypothesis import given, settings

from abtcore.analytics import (
    PROFILE_HEADER,
    clustering_coefficient,
    community_params,
    density,
    profile_cores,
    tau_steps,
    write_profile_csv,
)
from abtcore.generators import planted_communities
from abtcore.graph import BipartiteGraph, Subgraph, complete_bipartite
from abtcore.peeling import online_core
from abtcore.stats import degeneracy

import oracles
from conftest import bipartite_graphs


def two_k33_with_bridge():
    E = [(u, v) for u in range(3) for v in range(3)]
    E += [(u + 3, v + 3) for u in range(3) for v in range(3)]
    return BipartiteGraph(6, 6, E + [(0, 3)])


def test_density_examples():
    assert density(complete_bipartite(2, 2)) == 1.0
    k33 = complete_bipartite(3, 3)
    minus = BipartiteGraph(3, 3, [e for e in k33.edges if e != (0, 0)])
    assert density(minus) == pytest.approx(8 / 9, abs=0)
    assert density(BipartiteGraph(0, 0, [])) == 0.0
    assert density(Subgraph.empty()) == 0.0


def test_clustering_examples():
    assert clustering_coefficient(complete_bipartite(2, 2)) == 1.0
    path = BipartiteGraph(2, 2, [(0, 0), (1, 0), (1, 1)])
    assert clustering_coefficient(path) == 0.0
    k33 = complete_bipartite(3, 3)
    cat = oracles.caterpillars(oracles.edge_set(k33))
    assert clustering_coefficient(k33) == 4 * 9 / cat
    assert clustering_coefficient(BipartiteGraph(1, 1, [])) == 0.0


def test_k33_sweep_all_dense():
    rows = profile_cores(complete_bipartite(3, 3))
    assert rows and all(r.density == 1.0 for r in rows)
    assert {(r.alpha, r.beta) for r in rows} == {(a, b) for a in (1, 2, 3) for b in (1, 2, 3)}


def test_bridged_components():
    g = two_k33_with_bridge()
    rows = {(r.alpha, r.beta, r.tau): r for r in profile_cores(g, taus=[0, 1, 4])}
    base = rows[(1, 1, 0)]
    assert base.density == pytest.approx(19 / 36) and base.density < 1.0
    core = online_core(g, 1, 1, 4)
    strong = {e for e, s in oracles.supports(set(core.edges)).items() if s >= 4}
    for side in (range(0, 3), range(3, 6)):
        comp = {(u, v) for u, v in strong if u in side}
        U = {u for u, _ in comp}
        L = {v for _, v in comp}
        assert len(comp) / (len(U) * len(L)) == 1.0
    assert rows[(3, 3, 4)].upper_size == 6


def test_tau_steps():
    assert tau_steps(0) == [0]
    assert tau_steps(1) == [0, 1]
    assert tau_steps(6) == [0, 1, 2, 4, 6]
    assert tau_steps(8) == [0, 1, 2, 4, 8]


@settings(max_examples=25, deadline=None)
@given(bipartite_graphs(max_side=6, max_edges=25))
def test_rows_match_cores_and_brute_force_metrics(g):
    for r in profile_cores(g):
        c = online_core(g, r.alpha, r.beta, r.tau)
        assert (r.upper_size, r.lower_size, r.edge_count) == (len(c.upper), len(c.lower), len(c.edges))
        assert 0 <= r.density <= 1 and r.clustering >= 0
        E = set(c.edges)
        cat = oracles.caterpillars(E)
        assert r.clustering == (4 * len(oracles.butterflies(E)) / cat if cat else 0.0)
        assert r.density == len(E) / (len(c.upper) * len(c.lower))


@settings(max_examples=25, deadline=None)
@given(bipartite_graphs(max_side=6, max_edges=25))
def test_profile_sizes_non_increasing_along_tau(g):
    rows = profile_cores(g)
    by_ab = {}
    for r in rows:
        by_ab.setdefault((r.alpha, r.beta), []).append(r)
    for chain in by_ab.values():
        for p, q in zip(chain, chain[1:]):
            assert q.tau > p.tau
            assert q.upper_size <= p.upper_size and q.lower_size <= p.lower_size and q.edge_count <= p.edge_count


def test_row_cap():
    assert len(profile_cores(complete_bipartite(4, 4), max_rows=5)) == 5


def test_csv_header():
    buf = io.StringIO()
    write_profile_csv(profile_cores(complete_bipartite(2, 2)), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(PROFILE_HEADER) == "alpha,beta,tau,upper,lower,edges,density,clustering"
    assert len(lines) > 1


def test_community_params():
    assert community_params(10) == (6, 4)
    assert community_params(1) == (1, 1)


def test_density_rises_with_tau_on_planted_graph():
    g = planted_communities(120, 120, 6, (0.15, 0.5), 400, seed=3)
    a, b = community_params(degeneracy(g))
    rows = profile_cores(g, alphas=[a], betas=[b], taus=range(0, 200, 5))
    assert len(rows) >= 3
    dens = [r.density for r in rows]
    assert dens[-1] > dens[0]
