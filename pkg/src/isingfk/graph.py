"""Finite simple graphs and the connectivity queries used by measures and kernels.

Vertices and edges are dense 0-based indices.  Edge configurations are
integer bitmasks over edge indices (bit ``e`` set means edge ``e`` is open),
vertex sets are bitmasks over vertex indices.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path


class GraphError(ValueError):
    """Raised for malformed graphs or out-of-range indices."""


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    _incident: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        n = self.vertex_count
        if not isinstance(n, int) or n <= 0:
            raise GraphError(f"vertex_count must be a positive integer, got {n!r}")
        if not edges:
            raise GraphError("graph must have at least one edge")
        seen = set()
        for i, (u, v) in enumerate(edges):
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {i} = ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"edge {i} = ({u}, {v}) is a self-loop")
            key = frozenset((u, v))
            if key in seen:
                raise GraphError(f"edge {i} = ({u}, {v}) duplicates an earlier edge")
            seen.add(key)
        incident = [[] for _ in range(n)]
        for i, (u, v) in enumerate(edges):
            incident[u].append(i)
            incident[v].append(i)
        object.__setattr__(self, "_incident", tuple(tuple(x) for x in incident))

    @property
    def n(self) -> int:
        return self.vertex_count

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, x: int) -> int:
        return len(self.incident(x))

    def incident(self, x: int) -> tuple[int, ...]:
        if not 0 <= x < self.vertex_count:
            raise GraphError(f"vertex {x} out of range 0..{self.vertex_count - 1}")
        return self._incident[x]

    def other_end(self, e: int, x: int) -> int:
        u, v = self.edges[e]
        return v if u == x else u

    def to_dict(self) -> dict:
        return {"vertices": self.vertex_count, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, data) -> "Graph":
        if not isinstance(data, dict) or "vertices" not in data or "edges" not in data:
            raise GraphError('graph JSON must be an object with "vertices" and "edges"')
        try:
            edges = tuple((u, v) for u, v in data["edges"])
        except (TypeError, ValueError):
            raise GraphError('"edges" must be a list of [u, v] pairs') from None
        for u, v in edges:
            if not (isinstance(u, int) and isinstance(v, int)):
                raise GraphError(f"edge endpoints must be integers, got [{u!r}, {v!r}]")
        return cls(data["vertices"], edges)


def load_graph(path) -> Graph:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return Graph.from_dict(data)


def _check_edge(g: Graph, e: int):
    if not 0 <= e < g.m:
        raise GraphError(f"edge {e} out of range 0..{g.m - 1}")


def incident_edges(g: Graph, x: int) -> list[int]:
    """Edge indices having ``x`` as an endpoint, ascending."""
    return list(g.incident(x))


def cluster_of(g: Graph, eta: int, x: int, excluded: int | None = None) -> int:
    """Bitmask of the vertices joined to ``x`` by open edges, skipping ``excluded``."""
    g.incident(x)
    seen = 1 << x
    queue = deque([x])
    while queue:
        u = queue.popleft()
        for e in g._incident[u]:
            if e == excluded or not (eta >> e) & 1:
                continue
            w = g.other_end(e, u)
            if not (seen >> w) & 1:
                seen |= 1 << w
                queue.append(w)
    return seen


def gamma(g: Graph, eta: int, e: int) -> int:
    """1 if the endpoints of ``e`` are linked by open edges avoiding ``e`` itself."""
    _check_edge(g, e)
    u, v = g.edges[e]
    return (cluster_of(g, eta, u, excluded=e) >> v) & 1


def cluster_count(g: Graph, eta: int) -> int:
    """Number of open clusters, isolated vertices included."""
    remaining = (1 << g.n) - 1
    count = 0
    while remaining:
        x = (remaining & -remaining).bit_length() - 1
        remaining &= ~cluster_of(g, eta, x)
        count += 1
    return count


def vertices_of(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if (mask >> i) & 1]


def bipartition(g: Graph) -> int | None:
    """Spin bitmask of a proper 2-colouring, or None if ``g`` is not bipartite.

    Each component's smallest vertex is coloured 1.
    """
    colour = [-1] * g.n
    for root in range(g.n):
        if colour[root] != -1:
            continue
        colour[root] = 1
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for e in g._incident[u]:
                w = g.other_end(e, u)
                if colour[w] == -1:
                    colour[w] = 1 - colour[u]
                    queue.append(w)
                elif colour[w] == colour[u]:
                    return None
    return sum(1 << x for x in range(g.n) if colour[x] == 1)


@dataclass(frozen=True)
class HypothesisWitness:
    vertex: int
    sigma: int


@dataclass(frozen=True)
class HypothesisFailure:
    reasons: tuple[str, ...]

    def __bool__(self):
        return False


def check_hypothesis_adhy(g: Graph) -> HypothesisWitness | HypothesisFailure:
    """Find a vertex of degree >= 4 and a spin configuration with no aligned edge.

    An everywhere-anti-aligned configuration exists iff the graph is
    bipartite, so the 2-colouring serves as the witness.
    """
    reasons = []
    heavy = [x for x in range(g.n) if g.degree(x) >= 4]
    sigma = bipartition(g)
    if sigma is None:
        reasons.append("not bipartite")
    if not heavy:
        reasons.append(f"max degree {max(g.degree(x) for x in range(g.n))} < 4")
    if reasons:
        return HypothesisFailure(tuple(reasons))
    return HypothesisWitness(heavy[0], sigma)


# Bundled family used by the verification suite.

def complete2() -> Graph:
    return Graph(2, ((0, 1),))


def path(k: int) -> Graph:
    return Graph(k, tuple((i, i + 1) for i in range(k - 1)))


def star(leaves: int) -> Graph:
    return Graph(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))


def cycle(k: int) -> Graph:
    return Graph(k, tuple((i, (i + 1) % k) for i in range(k)))


def bundled_family() -> dict[str, Graph]:
    return {
        "K2": complete2(),
        "P3": path(3),
        "K13": star(3),
        "K14": star(4),
        "C4": cycle(4),
        "triangle": cycle(3),
    }
