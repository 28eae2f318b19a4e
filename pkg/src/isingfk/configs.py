"""Edge/spin configurations, local agreement indicators and compatibility."""

from __future__ import annotations

from typing import NamedTuple

from .graph import Graph, GraphError

DEFAULT_BIT_BUDGET = 24


class CapacityError(RuntimeError):
    """State space larger than the configured bit budget."""


class EdgeSpinState(NamedTuple):
    """A pair (eta, sigma) of bitmasks.

    eta bit e = 1 means edge e is open; sigma bit x = 1 means spin +1 at x.
    Tuple order coincides with the packed index eta * 2**n + sigma.
    """

    eta: int
    sigma: int

    def packed(self, g: Graph) -> int:
        return (self.eta << g.n) | self.sigma


def delta(sigma: int, e: int, g: Graph) -> int:
    u, v = g.edges[e]
    return 1 if ((sigma >> u) & 1) == ((sigma >> v) & 1) else 0


def spin(sigma: int, x: int) -> int:
    return 1 if (sigma >> x) & 1 else -1


def flip_spin(sigma: int, x: int) -> int:
    return sigma ^ (1 << x)


def toggle_edge(eta: int, e: int) -> int:
    return eta ^ (1 << e)


def flip_all(sigma: int, g: Graph) -> int:
    return sigma ^ ((1 << g.n) - 1)


def aligned_count(sigma: int, edges, g: Graph) -> int:
    return sum(delta(sigma, e, g) for e in edges)


def is_compatible(s: EdgeSpinState, g: Graph) -> bool:
    eta, sigma = s
    for e in range(g.m):
        if (eta >> e) & 1 and not delta(sigma, e, g):
            return False
    return True


def is_locally_compatible(s: EdgeSpinState, x: int, g: Graph) -> bool:
    eta, sigma = s
    for e in g.incident(x):
        if (eta >> e) & 1 and not delta(sigma, e, g):
            return False
    return True


def check_budget(g: Graph, budget: int = DEFAULT_BIT_BUDGET):
    if g.m + g.n > budget:
        raise CapacityError(
            f"state space needs {g.m + g.n} bits (|E|={g.m}, |V|={g.n}); limit is {budget}"
        )


def enumerate_states(g: Graph, support: str = "full", budget: int = DEFAULT_BIT_BUDGET) -> list[EdgeSpinState]:
    """All states in packed-index order; ``support='compatible'`` keeps only C."""
    if support not in ("full", "compatible"):
        raise ValueError(f"unknown support {support!r}")
    check_budget(g, budget)
    states = [EdgeSpinState(eta, sigma) for eta in range(1 << g.m) for sigma in range(1 << g.n)]
    if support == "compatible":
        states = [s for s in states if is_compatible(s, g)]
    return states


def spin_states(g: Graph, budget: int = DEFAULT_BIT_BUDGET) -> list[EdgeSpinState]:
    """Spin-only slice (eta fixed closed), the natural home of single-spin kernels."""
    check_budget(g, budget)
    return [EdgeSpinState(0, sigma) for sigma in range(1 << g.n)]


def edge_states(g: Graph, budget: int = DEFAULT_BIT_BUDGET) -> list[EdgeSpinState]:
    check_budget(g, budget)
    return [EdgeSpinState(eta, 0) for eta in range(1 << g.m)]


# Textual rendering: eta as '0'/'1' by ascending edge index, sigma as '+'/'-'
# by ascending vertex index.

def eta_str(eta: int, g: Graph) -> str:
    return "".join("1" if (eta >> e) & 1 else "0" for e in range(g.m))


def sigma_str(sigma: int, g: Graph) -> str:
    return "".join("+" if (sigma >> x) & 1 else "-" for x in range(g.n))


def parse_eta(text: str, g: Graph) -> int:
    if len(text) != g.m or set(text) - {"0", "1"}:
        raise GraphError(f"edge configuration {text!r} must be {g.m} characters of 0/1")
    return sum(1 << e for e, c in enumerate(text) if c == "1")


def parse_sigma(text: str, g: Graph) -> int:
    text = text.replace("−", "-")
    if len(text) != g.n or set(text) - {"+", "-"}:
        raise GraphError(f"spin configuration {text!r} must be {g.n} characters of +/-")
    return sum(1 << x for x, c in enumerate(text) if c == "+")


def state_str(s: EdgeSpinState, g: Graph) -> str:
    return f"({eta_str(s.eta, g)},{sigma_str(s.sigma, g)})"


def state_json(s: EdgeSpinState, g: Graph) -> dict:
    return {"eta": eta_str(s.eta, g), "sigma": sigma_str(s.sigma, g)}
