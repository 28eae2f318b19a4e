import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import S, small_graphs
from isingfk.configs import (
    CapacityError,
    EdgeSpinState,
    delta,
    enumerate_states,
    flip_all,
    flip_spin,
    is_compatible,
    is_locally_compatible,
    parse_eta,
    parse_sigma,
    sigma_str,
    state_str,
    toggle_edge,
)
from isingfk.graph import GraphError, bipartition, complete2, path, star
from oracles import compatible

K2, P3 = complete2(), path(3)


def test_delta():
    assert delta(parse_sigma("++", K2), 0, K2) == 1
    assert delta(parse_sigma("+-", K2), 0, K2) == 0


def test_alternating_spins_disagree_everywhere():
    g = star(4)
    sigma = bipartition(g)
    assert all(delta(sigma, e, g) == 0 for e in range(g.m))


def test_flip_and_toggle():
    assert sigma_str(flip_spin(parse_sigma("++", K2), 0), K2) == "-+"
    assert sigma_str(flip_spin(parse_sigma("---", P3), 1), P3) == "-+-"
    assert toggle_edge(parse_eta("00", P3), 0) == parse_eta("10", P3)
    assert toggle_edge(parse_eta("11", P3), 1) == parse_eta("10", P3)
    for x in range(3):
        assert flip_spin(flip_spin(5, x), x) == 5


def test_compatibility_examples():
    assert is_compatible(S("0", "+-", K2), K2)
    assert not is_compatible(S("1", "+-", K2), K2)
    assert is_compatible(S("10", "++-", P3), P3)
    s = S("10", "+--", P3)
    assert is_locally_compatible(s, 2, P3)
    assert not is_locally_compatible(s, 0, P3)


def test_state_counts():
    assert len(enumerate_states(K2, "full")) == 8
    assert len(enumerate_states(K2, "compatible")) == 6
    assert len(enumerate_states(P3, "full")) == 32
    assert S("1", "+-", K2) not in enumerate_states(K2, "compatible")


def test_packed_order():
    states = enumerate_states(P3)
    assert [s.packed(P3) for s in states] == list(range(32))


def test_capacity_error_names_limit():
    with pytest.raises(CapacityError, match="limit is 4"):
        enumerate_states(P3, budget=4)


def test_unknown_support():
    with pytest.raises(ValueError):
        enumerate_states(K2, "weird")


def test_render_and_parse():
    s = S("10", "+-+", P3)
    assert state_str(s, P3) == "(10,+-+)"
    assert parse_sigma("+−+", P3) == s.sigma
    with pytest.raises(GraphError):
        parse_eta("101", P3)
    with pytest.raises(GraphError):
        parse_sigma("+x", K2)


@given(small_graphs(), st.data())
def test_compatible_iff_locally_compatible_everywhere(g, data):
    s = EdgeSpinState(data.draw(st.integers(0, (1 << g.m) - 1)), data.draw(st.integers(0, (1 << g.n) - 1)))
    assert is_compatible(s, g) == all(is_locally_compatible(s, x, g) for x in range(g.n))
    assert is_compatible(s, g) == compatible(g, s.eta, s.sigma)


@given(small_graphs(), st.data())
def test_global_flip_preserves_agreement(g, data):
    sigma = data.draw(st.integers(0, (1 << g.n) - 1))
    assert all(delta(sigma, e, g) == delta(flip_all(sigma, g), e, g) for e in range(g.m))
