"""Brute-force reference implementations, independent of the package internals.

Connectivity goes through networkx; rates are evaluated pairwise straight
from the case definitions instead of enumerating targets.
"""

from fractions import Fraction

import networkx as nx

from isingfk.configs import EdgeSpinState


def bits(mask, width):
    return [(mask >> i) & 1 for i in range(width)]


def spins(sigma, n):
    return [1 if b else -1 for b in bits(sigma, n)]


def nx_graph(g, eta, skip=None):
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    for e, (u, v) in enumerate(g.edges):
        if e != skip and (eta >> e) & 1:
            G.add_edge(u, v)
    return G


def k_clusters(g, eta):
    return nx.number_connected_components(nx_graph(g, eta))


def gamma_nx(g, eta, e):
    u, v = g.edges[e]
    return int(nx.has_path(nx_graph(g, eta, skip=e), u, v))


def component(g, eta, x, skip=None):
    return set(nx.node_connected_component(nx_graph(g, eta, skip), x))


def agree(sigma, e, g):
    s = spins(sigma, g.n)
    u, v = g.edges[e]
    return int(s[u] == s[v])


def ip_product(g, p, eta, sigma):
    """IP numerator as the edgewise product p*1{open}*delta + (1-p)*1{closed}."""
    w = Fraction(1)
    for e in range(g.m):
        w *= p * agree(sigma, e, g) if (eta >> e) & 1 else 1 - p
    return w


def compatible(g, eta, sigma):
    return all(agree(sigma, e, g) for e in range(g.m) if (eta >> e) & 1)


def star(g, x):
    return [e for e, (u, v) in enumerate(g.edges) if x in (u, v)]


def diff(a, b, width):
    return [i for i in range(width) if ((a ^ b) >> i) & 1]


def one_change_q(g, p, s, t):
    de, ds = diff(s.eta, t.eta, g.m), diff(s.sigma, t.sigma, g.n)
    if not de and len(ds) == 1:
        x = ds[0]
        return Fraction(1) if all(not (s.eta >> e) & 1 for e in star(g, x)) else Fraction(0)
    if not ds and len(de) == 1:
        e = de[0]
        return (1 - p) if (s.eta >> e) & 1 else p * agree(s.sigma, e, g)
    return Fraction(0)


def site_star_q(g, p, s, t):
    ds = diff(s.sigma, t.sigma, g.n)
    if len(ds) != 1:
        return Fraction(0)
    x = ds[0]
    ex = star(g, x)
    if any(e not in ex for e in diff(s.eta, t.eta, g.m)):
        return Fraction(0)
    if any((t.eta >> e) & 1 and not agree(t.sigma, e, g) for e in ex):
        return Fraction(0)
    opened = sum((t.eta >> e) & 1 for e in ex)
    return p ** opened * (1 - p) ** (len(ex) - opened)


def _cluster_rule(g, p, s, t, singleton_only):
    de = diff(s.eta, t.eta, g.m)
    if len(de) != 1:
        return Fraction(0)
    e = de[0]
    open_e = (s.eta >> e) & 1
    base = (1 - p) if open_e else p
    in_c = compatible(g, s.eta, s.sigma)
    gam = gamma_nx(g, s.eta, e)
    d = agree(s.sigma, e, g)
    if t.sigma == s.sigma:
        if gam:
            return base * in_c
        if d:
            return base / 2 * in_c
        return Fraction(0)
    if gam or open_e != d:
        return Fraction(0)
    flipped = set(diff(s.sigma, t.sigma, g.n))
    for x in g.edges[e]:
        if singleton_only:
            if any((s.eta >> f) & 1 for f in star(g, x) if f != e) or flipped != {x}:
                continue
        elif flipped != component(g, s.eta, x, skip=e):
            continue
        if open_e:
            return Fraction(1, 4) * (1 - p) * in_c
        return Fraction(1, 4) * p * compatible(g, t.eta, t.sigma)
    return Fraction(0)


def cluster_flip_q(g, p, s, t):
    return _cluster_rule(g, p, s, t, singleton_only=False)


def edge_spin_q(g, p, s, t):
    return _cluster_rule(g, p, s, t, singleton_only=True)


ORACLES = {
    "one-change": one_change_q,
    "site-star": site_star_q,
    "cluster-flip": cluster_flip_q,
    "edge-spin": edge_spin_q,
}


def all_states(g):
    return [EdgeSpinState(h, s) for h in range(1 << g.m) for s in range(1 << g.n)]
