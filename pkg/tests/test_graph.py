import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import small_graphs
from isingfk.graph import (
    Graph,
    GraphError,
    HypothesisWitness,
    bipartition,
    check_hypothesis_adhy,
    cluster_count,
    cluster_of,
    complete2,
    cycle,
    gamma,
    incident_edges,
    load_graph,
    path,
    star,
    vertices_of,
)
from oracles import component, gamma_nx, k_clusters


def test_incident_edges_on_path():
    g = path(3)
    assert incident_edges(g, 1) == [0, 1]
    assert incident_edges(g, 0) == [0]
    assert g.degree(1) == 2


def test_incident_out_of_range():
    with pytest.raises(GraphError):
        incident_edges(path(3), 3)


@pytest.mark.parametrize("edges", [[[0, 0]], [[0, 1], [1, 0]], [[0, 5]], []])
def test_malformed_graphs_rejected(edges):
    with pytest.raises(GraphError):
        Graph.from_dict({"vertices": 3, "edges": edges})


def test_gamma_and_clusters_on_triangle():
    g = cycle(3)
    # edges 01 and 12 open: 02 is bridged by another path
    assert gamma(g, 0b011, 2) == 1
    assert gamma(g, 0b001, 2) == 0
    assert cluster_count(g, 0) == 3
    assert cluster_count(g, 0b011) == 1


def test_cluster_of_excluding_edge():
    g = path(3)
    assert vertices_of(cluster_of(g, 0b11, 0)) == [0, 1, 2]
    assert vertices_of(cluster_of(g, 0b11, 0, excluded=0)) == [0]
    assert vertices_of(cluster_of(g, 0b11, 1, excluded=0)) == [1, 2]


@given(small_graphs(), st.data())
def test_gamma_matches_networkx_and_ignores_e(g, data):
    eta = data.draw(st.integers(0, (1 << g.m) - 1))
    e = data.draw(st.integers(0, g.m - 1))
    assert gamma(g, eta, e) == gamma_nx(g, eta, e)
    assert gamma(g, eta, e) == gamma(g, eta ^ (1 << e), e)


@given(small_graphs(), st.data())
def test_toggle_changes_cluster_count_iff_not_bridged(g, data):
    eta = data.draw(st.integers(0, (1 << g.m) - 1))
    e = data.draw(st.integers(0, g.m - 1))
    k0 = cluster_count(g, eta)
    k1 = cluster_count(g, eta ^ (1 << e))
    assert k0 == k_clusters(g, eta)
    assert abs(k0 - k1) in (0, 1)
    assert (k0 == k1) == bool(gamma(g, eta, e))


@given(small_graphs(), st.data())
def test_cluster_relation_symmetric(g, data):
    eta = data.draw(st.integers(0, (1 << g.m) - 1))
    x = data.draw(st.integers(0, g.n - 1))
    y = data.draw(st.integers(0, g.n - 1))
    cx = cluster_of(g, eta, x)
    assert set(vertices_of(cx)) == component(g, eta, x)
    assert bool(cx >> y & 1) == bool(cluster_of(g, eta, y) >> x & 1)


@given(small_graphs())
def test_bipartition_is_proper(g):
    sigma = bipartition(g)
    if sigma is not None:
        assert all(((sigma >> u) ^ (sigma >> v)) & 1 for u, v in g.edges)


def test_hypothesis_on_bundled_family(family):
    res = check_hypothesis_adhy(family["K14"])
    assert isinstance(res, HypothesisWitness)
    assert res.vertex == 0
    assert not check_hypothesis_adhy(family["triangle"])
    assert not check_hypothesis_adhy(family["P3"])
    assert not check_hypothesis_adhy(family["C4"])


def test_load_graph_reports_position(tmp_path):
    bad = tmp_path / "g.json"
    bad.write_text('{"vertices": 2,\n "edges": [[0, 1]')
    with pytest.raises(GraphError, match="line 2"):
        load_graph(bad)


def test_roundtrip(tmp_path):
    f = tmp_path / "g.json"
    f.write_text(json.dumps(star(4).to_dict()))
    assert load_graph(f) == star(4)
    assert complete2().to_dict() == {"vertices": 2, "edges": [[0, 1]]}
