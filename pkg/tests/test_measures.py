from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import S, rationals, small_graphs
from isingfk.configs import EdgeSpinState, flip_all, flip_spin, parse_eta, parse_sigma
from isingfk.graph import complete2, cycle, path, star
from isingfk.measures import (
    CouplingParams,
    delta_x_H,
    fk_table,
    fk_weight,
    frac_str,
    ip_partition,
    ip_table,
    ip_weight,
    ising_hamiltonian,
    ising_table,
    ising_weight,
    parse_fraction,
    partition_identities,
)
from oracles import ip_product, k_clusters

K2, P3 = complete2(), path(3)


def P(x):
    return CouplingParams(F(x))


def test_ip_weight_examples():
    assert ip_weight(S("0", "++", K2), P("1/2"), K2) == F(1, 2)
    assert ip_weight(S("1", "+-", K2), P("1/3"), K2) == 0
    assert ip_weight(S("1", "--", K2), P("1/3"), K2) == F(1, 3)


@pytest.mark.parametrize("p,z", [("1/2", 3), ("1/3", F(10, 3)), ("3/4", F(5, 2))])
def test_partition_k2(p, z):
    assert ip_partition(K2, P(p)) == z
    ids = partition_identities(K2, P(p))
    assert ids.Z == ids.Z_RC == z
    assert ids.exact


def test_fk_weight_examples():
    assert fk_weight(0, P("1/2"), K2) == 2
    assert fk_weight(1, P("1/2"), K2) == 1
    assert fk_weight(parse_eta("10", P3), P("1/2"), P3) == 1


def test_hamiltonian_examples():
    assert ising_hamiltonian(parse_sigma("++", K2), K2) == F(-1, 2)
    assert ising_hamiltonian(parse_sigma("+-", K2), K2) == F(1, 2)
    assert ising_hamiltonian(parse_sigma("+++", P3), P3) == -1


def test_delta_x_H_examples():
    assert delta_x_H(parse_sigma("++", K2), 0, K2) == 1
    assert delta_x_H(parse_sigma("+-", K2), 0, K2) == -1
    g = star(4)
    assert delta_x_H(parse_sigma("+++--", g), 0, g) == 0


def test_ising_weight_examples():
    assert ising_weight(parse_sigma("++", K2), P("1/2"), K2) == 1
    assert ising_weight(parse_sigma("+-", K2), P("1/2"), K2) == F(1, 2)


def test_odd_edge_count_uses_squared_identity():
    ids = partition_identities(cycle(3), P("1/2"))
    assert ids.Z_beta is None
    assert ids.exact
    ids = partition_identities(cycle(4), P("2/3"))
    assert ids.Z_beta is not None and ids.Z_beta ** 2 == ids.Z_beta_squared


def test_fraction_parsing():
    assert parse_fraction("2/4") == F(1, 2)
    assert frac_str(F(3)) == "3/1"
    with pytest.raises(ValueError):
        P("5/4")
    with pytest.raises(ValueError):
        P("0")


@given(small_graphs(max_vertices=4, max_edges=5), rationals)
def test_marginals_of_ip(g, p):
    params = CouplingParams(p)
    ip = ip_table(g, params).weights
    for eta, w in fk_table(g, params).weights.items():
        assert w == sum(ip.get(EdgeSpinState(eta, s), 0) for s in range(1 << g.n))
        assert w == p ** bin(eta).count("1") * (1 - p) ** (g.m - bin(eta).count("1")) * 2 ** k_clusters(g, eta)
    for sigma, w in ising_table(g, params).weights.items():
        assert w == sum(ip.get(EdgeSpinState(h, sigma), 0) for h in range(1 << g.m))
        assert w == ising_weight(flip_all(sigma, g), params, g)
    assert partition_identities(g, params).exact


@given(small_graphs(max_vertices=4, max_edges=5), rationals, st.data())
def test_ip_matches_product_formula(g, p, data):
    s = EdgeSpinState(data.draw(st.integers(0, (1 << g.m) - 1)), data.draw(st.integers(0, (1 << g.n) - 1)))
    assert ip_weight(s, CouplingParams(p), g) == ip_product(g, p, s.eta, s.sigma)


@given(small_graphs(), st.data())
def test_delta_x_H_antisymmetric(g, data):
    sigma = data.draw(st.integers(0, (1 << g.n) - 1))
    x = data.draw(st.integers(0, g.n - 1))
    assert delta_x_H(sigma, x, g) == -delta_x_H(flip_spin(sigma, x), x, g)
    assert ising_hamiltonian(flip_spin(sigma, x), g) - ising_hamiltonian(sigma, g) == delta_x_H(sigma, x, g)
