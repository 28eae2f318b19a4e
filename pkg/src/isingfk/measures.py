"""Exact rational weights for the coupling measure and its two marginals.

The inverse temperature never appears as a float: every ``exp(-beta)`` is
written as ``1 - p``, so all weights are rational.  Weights are unnormalized.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .configs import (
    DEFAULT_BIT_BUDGET,
    EdgeSpinState,
    aligned_count,
    check_budget,
    delta,
    enumerate_states,
    flip_spin,
    is_compatible,
    spin,
)
from .graph import Graph, cluster_count


def parse_fraction(text) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise ValueError(f"cannot parse {text!r} as a rational number") from None


def frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class CouplingParams:
    """Edge-opening probability p in (0, 1); implicitly beta = -log(1 - p)."""

    p: Fraction

    def __post_init__(self):
        p = parse_fraction(self.p) if isinstance(self.p, str) else Fraction(self.p)
        if not 0 < p < 1:
            raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
        object.__setattr__(self, "p", p)

    @property
    def q(self) -> Fraction:
        """1 - p, i.e. exp(-beta)."""
        return 1 - self.p


@dataclass(frozen=True)
class WeightTable:
    weights: dict
    total: Fraction

    def normalized(self) -> dict:
        return {k: w / self.total for k, w in self.weights.items()}


def ip_weight(s: EdgeSpinState, params: CouplingParams, g: Graph) -> Fraction:
    if not is_compatible(s, g):
        return Fraction(0)
    k = bin(s.eta).count("1")
    return params.p ** k * params.q ** (g.m - k)


def fk_weight(eta: int, params: CouplingParams, g: Graph) -> Fraction:
    k = bin(eta).count("1")
    return params.p ** k * params.q ** (g.m - k) * 2 ** cluster_count(g, eta)


def ising_weight(sigma: int, params: CouplingParams, g: Graph) -> Fraction:
    """(1-p)**(number of disagreeing edges); equals the eta-sum of ip_weight."""
    return params.q ** (g.m - aligned_count(sigma, range(g.m), g))


def ising_hamiltonian(sigma: int, g: Graph) -> Fraction:
    return Fraction(-sum(spin(sigma, u) * spin(sigma, v) for u, v in g.edges), 2)


def delta_x_H(sigma: int, x: int, g: Graph) -> int:
    """H(sigma^x) - H(sigma), via the incident-edge agreement sum."""
    return sum(2 * delta(sigma, e, g) - 1 for e in g.incident(x))


def ip_table(g: Graph, params: CouplingParams, budget: int = DEFAULT_BIT_BUDGET) -> WeightTable:
    weights = {s: ip_weight(s, params, g) for s in enumerate_states(g, "full", budget)}
    return WeightTable(weights, sum(weights.values(), Fraction(0)))


def fk_table(g: Graph, params: CouplingParams, budget: int = DEFAULT_BIT_BUDGET) -> WeightTable:
    check_budget(g, budget)
    weights = {eta: fk_weight(eta, params, g) for eta in range(1 << g.m)}
    return WeightTable(weights, sum(weights.values(), Fraction(0)))


def ising_table(g: Graph, params: CouplingParams, budget: int = DEFAULT_BIT_BUDGET) -> WeightTable:
    check_budget(g, budget)
    weights = {sigma: ising_weight(sigma, params, g) for sigma in range(1 << g.n)}
    return WeightTable(weights, sum(weights.values(), Fraction(0)))


def ip_partition(g: Graph, params: CouplingParams, budget: int = DEFAULT_BIT_BUDGET) -> Fraction:
    return ip_table(g, params, budget).total


@dataclass(frozen=True)
class PartitionIdentities:
    Z: Fraction
    Z_RC: Fraction
    Z_I: Fraction
    Z_beta: Fraction | None  # None when |E| is odd (irrational)
    Z_beta_squared: Fraction
    residuals: dict

    @property
    def exact(self) -> bool:
        return all(r == 0 for r in self.residuals.values())


def partition_identities(g: Graph, params: CouplingParams, budget: int = DEFAULT_BIT_BUDGET) -> PartitionIdentities:
    r = params.q
    Z = ip_partition(g, params, budget)
    Z_RC = fk_table(g, params, budget).total
    # Z_I = sum_sigma exp(beta * #aligned) = sum_sigma r**(-#aligned)
    Z_I = sum((r ** -aligned_count(s, range(g.m), g) for s in range(1 << g.n)), Fraction(0))
    # exp(-beta H) = r**H with H in (1/2)Z; group by 2H so the square stays rational.
    by_twice_h = Counter(int(2 * ising_hamiltonian(s, g)) for s in range(1 << g.n))
    Z_beta_sq = sum(
        (ca * cb * r ** ((a + b) // 2) for a, ca in by_twice_h.items() for b, cb in by_twice_h.items()),
        Fraction(0),
    )
    Z_beta = None
    if g.m % 2 == 0:
        Z_beta = sum((c * r ** (k // 2) for k, c in by_twice_h.items()), Fraction(0))
    residuals = {
        "Z_RC - Z": Z_RC - Z,
        "Z_I * (1-p)^|E| - Z": Z_I * r ** g.m - Z,
        "Z_beta^2 - Z_I^2 * (1-p)^|E|": Z_beta_sq - Z_I ** 2 * r ** g.m,
    }
    if Z_beta is not None:
        residuals["Z_beta - Z_I * (1-p)^(|E|/2)"] = Z_beta - Z_I * r ** (g.m // 2)
    return PartitionIdentities(Z, Z_RC, Z_I, Z_beta, Z_beta_sq, residuals)


def flip_increment_consistent(sigma: int, x: int, g: Graph) -> bool:
    return ising_hamiltonian(flip_spin(sigma, x), g) - ising_hamiltonian(sigma, g) == delta_x_H(sigma, x, g)
