from fractions import Fraction

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from isingfk.configs import EdgeSpinState, parse_eta, parse_sigma
from isingfk.graph import Graph, bundled_family
from isingfk.measures import CouplingParams

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

PS = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3))


@st.composite
def small_graphs(draw, max_vertices=5, max_edges=6):
    n = draw(st.integers(2, max_vertices))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=min(max_edges, len(pairs)), unique=True))
    return Graph(n, tuple(chosen))


rationals = st.fractions(min_value=Fraction(1, 20), max_value=Fraction(19, 20), max_denominator=20).filter(
    lambda q: 0 < q < 1
)


def S(eta: str, sigma: str, g: Graph) -> EdgeSpinState:
    return EdgeSpinState(parse_eta(eta, g), parse_sigma(sigma, g))


@pytest.fixture(scope="session")
def family():
    return bundled_family()


@pytest.fixture
def half():
    return CouplingParams(Fraction(1, 2))
