"""Transition-rate kernels on edge-spin configurations.

Every kernel lists, for a source state, the distinct targets reachable in one
jump with their (strictly positive, exact rational) rates.  The diagonal of
the generator is implied and never stored.  Kernels are evaluated on the full
product space; gating indicators are applied literally.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from .configs import (
    EdgeSpinState,
    aligned_count,
    delta,
    flip_spin,
    is_compatible,
    is_locally_compatible,
    toggle_edge,
)
from .graph import Graph, cluster_of, gamma
from .measures import CouplingParams, delta_x_H


class RepresentabilityError(ValueError):
    """A requested rate is irrational under exact arithmetic."""


class TransitionKernel:
    name = "kernel"
    support = "full"
    # True when every transition changes eta or sigma but never both.
    one_coordinate = False

    def __init__(self, params: CouplingParams, g: Graph):
        self.params = params
        self.g = g

    def outgoing(self, s: EdgeSpinState) -> list[tuple[EdgeSpinState, Fraction]]:
        acc: dict[EdgeSpinState, Fraction] = {}
        for target, rate in self._transitions(s):
            if rate and target != s:
                acc[target] = acc.get(target, Fraction(0)) + rate
        return sorted((t, r) for t, r in acc.items() if r > 0)

    def _transitions(self, s):
        raise NotImplementedError

    def rate(self, s: EdgeSpinState, t: EdgeSpinState) -> Fraction:
        return dict(self.outgoing(s)).get(t, Fraction(0))

    def total_rate(self, s: EdgeSpinState) -> Fraction:
        return sum((r for _, r in self.outgoing(s)), Fraction(0))

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} p={self.params.p}>"


GLAUBER_VARIANTS = ("metropolis", "heatbath", "heatbath-printed", "unnamed", "edgeweight")


class GlauberSpinKernel(TransitionKernel):
    """Single spin flips with a Glauber rate; eta is never touched."""

    one_coordinate = True

    def __init__(self, variant: str, params: CouplingParams, g: Graph):
        super().__init__(params, g)
        if variant not in GLAUBER_VARIANTS:
            raise ValueError(f"unknown Glauber variant {variant!r}")
        if variant == "unnamed":
            odd = [x for x in range(g.n) if g.degree(x) % 2]
            if odd:
                raise RepresentabilityError(
                    f"exp(-beta*dH/2) is irrational at odd-degree vertices {odd}; "
                    "use the 'edgeweight' variant"
                )
        self.variant = variant
        self.name = f"glauber:{variant}"

    def flip_rate(self, sigma: int, x: int) -> Fraction:
        r = self.params.q
        dh = delta_x_H(sigma, x, self.g)
        v = self.variant
        if v == "metropolis":
            return r ** max(dh, 0)
        if v == "heatbath":
            return 1 / (1 + r ** -dh)
        if v == "heatbath-printed":
            return 1 / (1 + r ** -max(dh, 0))
        if v == "unnamed":
            return r ** (dh // 2)
        return r ** aligned_count(sigma, self.g.incident(x), self.g)

    def _transitions(self, s):
        for x in range(self.g.n):
            yield EdgeSpinState(s.eta, flip_spin(s.sigma, x)), self.flip_rate(s.sigma, x)


class FKEdgeKernel(TransitionKernel):
    """Single-edge heat-bath-like dynamics reversible for the random-cluster weight."""

    name = "fk"
    one_coordinate = True

    def edge_rate(self, eta: int, e: int) -> Fraction:
        p = self.params.p
        if (eta >> e) & 1:
            return 1 - p
        return p if gamma(self.g, eta, e) else p / 2

    def _transitions(self, s):
        for e in range(self.g.m):
            yield EdgeSpinState(toggle_edge(s.eta, e), s.sigma), self.edge_rate(s.eta, e)


class OneChangeKernel(TransitionKernel):
    """At most one spin or one edge per jump."""

    name = "one-change"
    support = "compatible"
    one_coordinate = True

    def _transitions(self, s):
        g, p = self.g, self.params.p
        eta, sigma = s
        for x in range(g.n):
            if all(not (eta >> e) & 1 for e in g.incident(x)):
                yield EdgeSpinState(eta, flip_spin(sigma, x)), Fraction(1)
        for e in range(g.m):
            rate = (1 - p) if (eta >> e) & 1 else p * delta(sigma, e, g)
            yield EdgeSpinState(toggle_edge(eta, e), sigma), rate


class SiteStarKernel(TransitionKernel):
    """Flip one spin and resample its incident edges together."""

    name = "site-star"
    support = "compatible"

    def _transitions(self, s):
        g, p, r = self.g, self.params.p, self.params.q
        eta, sigma = s
        for x in range(g.n):
            star = g.incident(x)
            new_sigma = flip_spin(sigma, x)
            star_mask = sum(1 << e for e in star)
            for bits in product((0, 1), repeat=len(star)):
                new_eta = eta & ~star_mask
                for e, b in zip(star, bits):
                    new_eta |= b << e
                target = EdgeSpinState(new_eta, new_sigma)
                if not is_locally_compatible(target, x, g):
                    continue
                opened = sum(bits)
                yield target, p ** opened * r ** (len(star) - opened)


class ClusterFlipKernel(TransitionKernel):
    """One edge plus, possibly, the open cluster of one of its endpoints."""

    name = "cluster-flip"
    support = "compatible"
    singleton_only = False

    def _edge_moves(self, s):
        g, p = self.g, self.params.p
        eta, sigma = s
        in_c = is_compatible(s, g)
        for e in range(g.m):
            is_open = (eta >> e) & 1
            base = (1 - p) if is_open else p
            new_eta = toggle_edge(eta, e)
            if gamma(g, eta, e):
                if in_c:
                    yield EdgeSpinState(new_eta, sigma), base
                continue
            d = delta(sigma, e, g)
            if d and in_c:
                yield EdgeSpinState(new_eta, sigma), base / 2
            if is_open != d:
                continue
            for x in g.edges[e]:
                new_sigma = self._flip(s, e, x)
                if new_sigma is None:
                    continue
                target = EdgeSpinState(new_eta, new_sigma)
                if is_open:
                    gate = in_c
                else:
                    gate = is_compatible(target, g)
                if gate:
                    yield target, base / 4

    def _flip(self, s, e, x):
        return s.sigma ^ cluster_of(self.g, s.eta, x, excluded=e)

    def _transitions(self, s):
        return self._edge_moves(s)


class EdgeSpinKernel(ClusterFlipKernel):
    """Cluster-flip moves restricted to clusters reduced to the single endpoint."""

    name = "edge-spin"

    def _flip(self, s, e, x):
        if any((s.eta >> f) & 1 for f in self.g.incident(x) if f != e):
            return None
        return flip_spin(s.sigma, x)


class SuperposedKernel(TransitionKernel):
    """Sum of several kernels' rates on the same state space."""

    def __init__(self, *kernels: TransitionKernel):
        first = kernels[0]
        super().__init__(first.params, first.g)
        self.kernels = kernels
        self.name = "+".join(k.name for k in kernels)
        self.one_coordinate = all(k.one_coordinate for k in kernels)

    def _transitions(self, s):
        for k in self.kernels:
            yield from k.outgoing(s)


KERNEL_NAMES = (
    "glauber:metropolis",
    "glauber:heatbath",
    "glauber:heatbath-printed",
    "glauber:edgeweight",
    "glauber:unnamed",
    "fk",
    "one-change",
    "site-star",
    "cluster-flip",
    "edge-spin",
)

COUPLED_KERNELS = ("one-change", "site-star", "cluster-flip", "edge-spin")

_CLASSES = {
    "fk": FKEdgeKernel,
    "one-change": OneChangeKernel,
    "site-star": SiteStarKernel,
    "cluster-flip": ClusterFlipKernel,
    "edge-spin": EdgeSpinKernel,
}


def make_kernel(name: str, params: CouplingParams, g: Graph) -> TransitionKernel:
    if name.startswith("glauber:"):
        return GlauberSpinKernel(name.split(":", 1)[1], params, g)
    try:
        return _CLASSES[name](params, g)
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; choose from {', '.join(KERNEL_NAMES)}") from None


def glauber_spin_kernel(variant, params, g):
    return GlauberSpinKernel(variant, params, g)


def fk_edge_kernel(params, g):
    return FKEdgeKernel(params, g)


def one_change_kernel(params, g):
    return OneChangeKernel(params, g)


def site_star_kernel(params, g):
    return SiteStarKernel(params, g)


def cluster_flip_kernel(params, g):
    return ClusterFlipKernel(params, g)


def edge_spin_kernel(params, g):
    return EdgeSpinKernel(params, g)
