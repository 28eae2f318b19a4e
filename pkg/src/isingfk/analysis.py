"""Exact generator-level checks: reversibility, stationarity, lumpability.

Every verdict carries a concrete witness.  All comparisons are exact
``Fraction`` equalities; nothing is rounded.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial

from .configs import (
    EdgeSpinState,
    aligned_count,
    enumerate_states,
    eta_str,
    flip_spin,
    is_compatible,
    sigma_str,
    state_json,
    toggle_edge,
)
from .graph import Graph, GraphError, check_hypothesis_adhy, gamma
from .kernels import TransitionKernel
from .measures import CouplingParams, frac_str, fk_weight, ip_weight, ising_weight


class SupportNotClosedError(RuntimeError):
    def __init__(self, source, target, rate, g):
        self.source, self.target, self.rate = source, target, rate
        super().__init__(
            f"transition {state_json(source, g)} -> {state_json(target, g)} "
            f"(rate {frac_str(rate)}) leaves the support"
        )


@dataclass
class Verdict:
    name: str
    verdict: str  # "pass" | "fail" | "n/a"
    witness: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "witness": self.witness}


# Weight functions over EdgeSpinState, picklable via partial.

def _ip(params, g, s):
    return ip_weight(s, params, g)


def _ising(params, g, s):
    return ising_weight(s.sigma, params, g)


def _fk(params, g, s):
    return fk_weight(s.eta, params, g)


def _product(params, g, s):
    return fk_weight(s.eta, params, g) * ising_weight(s.sigma, params, g)


def _uniform(s):
    return Fraction(1)


def ip_weight_fn(params: CouplingParams, g: Graph):
    return partial(_ip, params, g)


def ising_weight_fn(params: CouplingParams, g: Graph):
    return partial(_ising, params, g)


def fk_weight_fn(params: CouplingParams, g: Graph):
    return partial(_fk, params, g)


def product_weight_fn(params: CouplingParams, g: Graph):
    return partial(_product, params, g)


uniform_weight = _uniform


def resolve_support(support, g: Graph) -> list[EdgeSpinState]:
    if support is None or support == "compatible":
        return enumerate_states(g, "compatible")
    if support == "full":
        return enumerate_states(g, "full")
    return sorted(support)


class _Rates:
    """Memoized outgoing transitions of a kernel."""

    def __init__(self, kernel: TransitionKernel):
        self.kernel = kernel
        self._cache: dict = {}

    def out(self, s) -> dict:
        try:
            return self._cache[s]
        except KeyError:
            d = self._cache[s] = dict(self.kernel.outgoing(s))
            return d

    def q(self, s, t) -> Fraction:
        return self.out(s).get(t, Fraction(0))


def _pair(g, s, t, **values):
    w = {"from": state_json(s, g), "to": state_json(t, g)}
    w.update({k: frac_str(v) for k, v in values.items()})
    return w


def check_detailed_balance(kernel: TransitionKernel, weight, support=None, name="detailed_balance") -> Verdict:
    """w(s) q(s,t) == w(t) q(t,s) for every pair with a support endpoint and a nonzero side."""
    g = kernel.g
    states = resolve_support(support, g)
    rates = _Rates(kernel)
    pairs = 0
    for s in states:
        ws = weight(s)
        for t, r in rates.out(s).items():
            lhs = ws * r
            rhs = weight(t) * rates.q(t, s)
            pairs += 1
            if lhs != rhs:
                return Verdict(name, "fail", _pair(g, s, t, forward=lhs, backward=rhs))
    return Verdict(name, "pass", {"pairs_checked": pairs, "states": len(states)})


def check_stationarity(kernel: TransitionKernel, weight, support=None, name="stationarity") -> Verdict:
    """Global balance: inflow equals outflow at every support state."""
    g = kernel.g
    states = resolve_support(support, g)
    members = set(states)
    rates = _Rates(kernel)
    inflow = defaultdict(Fraction)
    for s in states:
        ws = weight(s)
        for t, r in rates.out(s).items():
            if t not in members:
                raise SupportNotClosedError(s, t, r, g)
            inflow[t] += ws * r
    for s in states:
        outflow = weight(s) * sum(rates.out(s).values(), Fraction(0))
        if inflow[s] != outflow:
            return Verdict(name, "fail", {
                "state": state_json(s, g), "inflow": frac_str(inflow[s]), "outflow": frac_str(outflow)
            })
    return Verdict(name, "pass", {"states": len(states)})


def check_irreducible(kernel: TransitionKernel, support=None, name="irreducible") -> Verdict:
    g = kernel.g
    states = resolve_support(support, g)
    if len(states) <= 1:
        return Verdict(name, "pass", {"states": len(states)})
    members = set(states)
    rates = _Rates(kernel)
    forward = defaultdict(list)
    backward = defaultdict(list)
    for s in states:
        for t in rates.out(s):
            if t in members:
                forward[s].append(t)
                backward[t].append(s)

    def reach(adj):
        seen = {states[0]}
        queue = deque(seen)
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return seen

    for direction, adj in (("from", forward), ("to", backward)):
        seen = reach(adj)
        if len(seen) != len(states):
            missing = next(s for s in states if s not in seen)
            return Verdict(name, "fail", {
                "root": state_json(states[0], g),
                "unreachable_" + direction + "_root": state_json(missing, g),
                "reached": len(seen),
                "states": len(states),
            })
    return Verdict(name, "pass", {"states": len(states)})


PROJECTIONS = ("spin", "edge")


def project(s: EdgeSpinState, projection: str) -> int:
    return s.sigma if projection == "spin" else s.eta


def block_label(block: int, projection: str, g: Graph) -> str:
    return sigma_str(block, g) if projection == "spin" else eta_str(block, g)


@dataclass
class LumpabilityResult:
    projection: str
    lumpable: bool
    rates: dict  # (block_i, block_j) -> Fraction, only when lumpable
    witness: dict
    notes: list
    rates_json: list = field(default_factory=list)

    def verdict(self, name=None) -> Verdict:
        name = name or f"lumpability:{self.projection}"
        if self.lumpable:
            return Verdict(name, "pass", {"lumped_rates": self.rates_json, "notes": self.notes})
        return Verdict(name, "fail", dict(self.witness, notes=self.notes))

    def lumped_rate(self, i, j) -> Fraction:
        return self.rates.get((i, j), Fraction(0))


def check_lumpability(kernel: TransitionKernel, projection: str, support=None) -> LumpabilityResult:
    """Block-sum criterion: sum over each foreign block must be constant on every block."""
    if projection not in PROJECTIONS:
        raise ValueError(f"projection must be one of {PROJECTIONS}")
    g = kernel.g
    states = resolve_support(support, g)
    blocks = defaultdict(list)
    for s in states:
        blocks[project(s, projection)].append(s)
    notes = []
    lumped = {}
    witness = {}
    for i in sorted(blocks):
        members = blocks[i]
        if len(members) == 1:
            notes.append(f"block {block_label(i, projection, g)} is a singleton")
        reference = None
        for s in members:
            sums = defaultdict(Fraction)
            for t, r in kernel.outgoing(s):
                j = project(t, projection)
                if j != i:
                    sums[j] += r
            if reference is None:
                reference = (s, dict(sums))
                continue
            ref_state, ref_sums = reference
            for j in sorted(set(ref_sums) | set(sums)):
                a, b = ref_sums.get(j, Fraction(0)), sums.get(j, Fraction(0))
                if a != b:
                    witness = {
                        "block": block_label(i, projection, g),
                        "target_block": block_label(j, projection, g),
                        "state_a": state_json(ref_state, g),
                        "sum_a": frac_str(a),
                        "state_b": state_json(s, g),
                        "sum_b": frac_str(b),
                    }
                    return LumpabilityResult(projection, False, {}, witness, notes)
        for j, r in reference[1].items():
            lumped[(i, j)] = r
    rates_json = [
        {"from": block_label(i, projection, g), "to": block_label(j, projection, g), "rate": frac_str(r)}
        for (i, j), r in sorted(lumped.items())
    ]
    return LumpabilityResult(projection, True, lumped, {}, notes, rates_json)


def _ip_column_sums(params, g, sigma=None, eta=None):
    if sigma is not None:
        pairs = [EdgeSpinState(h, sigma) for h in range(1 << g.m)]
    else:
        pairs = [EdgeSpinState(eta, s) for s in range(1 << g.n)]
    return [(s, ip_weight(s, params, g)) for s in pairs]


def conditional_rate_spin(kernel: TransitionKernel, params: CouplingParams, g: Graph, sigma: int, x: int) -> Fraction:
    """IP-averaged infinitesimal rate of sigma -> sigma^x given the spins."""
    target_sigma = flip_spin(sigma, x)
    column = _ip_column_sums(params, g, sigma=sigma)
    mass = sum((w for _, w in column), Fraction(0))
    assert mass > 0, "all-closed eta is always compatible"
    flow = Fraction(0)
    for s, w in column:
        if w:
            flow += w * sum((r for t, r in kernel.outgoing(s) if t.sigma == target_sigma), Fraction(0))
    return flow / mass


def conditional_rate_edge(kernel: TransitionKernel, params: CouplingParams, g: Graph, eta: int, e: int) -> Fraction:
    """IP-averaged infinitesimal rate of eta -> eta^e given the edges."""
    target_eta = toggle_edge(eta, e)
    column = _ip_column_sums(params, g, eta=eta)
    mass = sum((w for _, w in column), Fraction(0))
    assert mass > 0
    flow = Fraction(0)
    for s, w in column:
        if w:
            flow += w * sum((r for t, r in kernel.outgoing(s) if t.eta == target_eta), Fraction(0))
    return flow / mass


def glauber_marginal_rate(params: CouplingParams, g: Graph, sigma: int, x: int) -> Fraction:
    """(1-p)**(aligned edges at x): the target spin-marginal flip rate."""
    return params.q ** aligned_count(sigma, g.incident(x), g)


def fk_marginal_rate(params: CouplingParams, g: Graph, eta: int, e: int) -> Fraction:
    p = params.p
    if (eta >> e) & 1:
        return 1 - p
    return p if gamma(g, eta, e) else p / 2


def edge_spin_conditional_rate(params: CouplingParams, g: Graph, sigma: int, x: int) -> Fraction:
    deg = g.degree(x)
    return Fraction(deg, 4) * params.p * params.q ** aligned_count(sigma, g.incident(x), g)


def check_glauber_type(lumped: LumpabilityResult, params: CouplingParams, g: Graph, name="glauber_type") -> Verdict:
    """Lumped spin kernel flips one spin at a time, at positive rates proportional to the Glauber marginal."""
    if not lumped.lumpable or lumped.projection != "spin":
        return Verdict(name, "n/a", {"reason": "spin marginal is not lumpable"})
    for (i, j), r in sorted(lumped.rates.items()):
        if bin(i ^ j).count("1") != 1:
            return Verdict(name, "fail", {
                "reason": "lumped jump changes more than one spin",
                "from": sigma_str(i, g), "to": sigma_str(j, g), "rate": frac_str(r),
            })
    blocks = sorted({i for i, _ in lumped.rates} | {j for _, j in lumped.rates})
    ratio = None
    for sigma in blocks:
        for x in range(g.n):
            r = lumped.lumped_rate(sigma, flip_spin(sigma, x))
            if r <= 0:
                return Verdict(name, "fail", {
                    "reason": "zero flip rate", "sigma": sigma_str(sigma, g), "x": x,
                })
            target = glauber_marginal_rate(params, g, sigma, x)
            if ratio is None:
                ratio = r / target
            elif r != ratio * target:
                return Verdict(name, "fail", {
                    "reason": "not proportional to the Glauber marginal rates",
                    "sigma": sigma_str(sigma, g), "x": x,
                    "rate": frac_str(r), "expected": frac_str(ratio * target),
                })
    return Verdict(name, "pass", {"ratio": frac_str(ratio)})


@dataclass
class DreamReport:
    reversible: Verdict
    spin_markov: Verdict
    edge_markov: Verdict
    glauber_type: Verdict
    spin_lumping: LumpabilityResult
    edge_lumping: LumpabilityResult

    def verdicts(self) -> list[Verdict]:
        return [self.reversible, self.spin_markov, self.edge_markov, self.glauber_type]


def dream_report(kernel: TransitionKernel, params: CouplingParams, g: Graph, support="compatible") -> DreamReport:
    states = resolve_support(support, g)
    reversible = check_detailed_balance(kernel, ip_weight_fn(params, g), states, name="reversible")
    spin = check_lumpability(kernel, "spin", states)
    edge = check_lumpability(kernel, "edge", states)
    return DreamReport(
        reversible,
        spin.verdict("spin_markov"),
        edge.verdict("edge_markov"),
        check_glauber_type(spin, params, g),
        spin,
        edge,
    )


THEO1_PREMISES = (
    ("reversible", "coupled dynamics is IP-reversible"),
    ("spin_glauber", "spin marginal is a one-spin-flip Markov process"),
    ("edge_markov", "edge marginal lumpable"),
)


def smallest_mixed_neighbourhood(g: Graph, x: int) -> int:
    """Smallest packed spin configuration with >= 2 plus and >= 2 minus neighbours of x."""
    nbrs = [g.other_end(e, x) for e in g.incident(x)]
    for sigma in range(1 << g.n):
        plus = sum((sigma >> y) & 1 for y in nbrs)
        if plus >= 2 and len(nbrs) - plus >= 2:
            return sigma
    raise GraphError(f"vertex {x} has fewer than four neighbours")


def theo1_witness(kernel: TransitionKernel, params: CouplingParams, g: Graph) -> dict:
    """Evaluate the impossibility argument's chain of premises on one kernel."""
    hyp = check_hypothesis_adhy(g)
    if not hyp:
        raise GraphError("hypothesis fails: " + "; ".join(hyp.reasons))
    x, sigma_bar = hyp.vertex, hyp.sigma
    star_mask = sum(1 << e for e in g.incident(x))
    eta_bar = 0
    sigma_hat = smallest_mixed_neighbourhood(g, x)
    bar = EdgeSpinState(eta_bar, sigma_bar)
    bar_x = EdgeSpinState(star_mask, flip_spin(sigma_bar, x))
    w = ip_weight_fn(params, g)

    back = kernel.rate(bar_x, bar)
    fwd = kernel.rate(bar, bar_x)
    step_a = {"rate_barx_to_bar": frac_str(back), "positive": back > 0}
    step_b = {
        "rate_bar_to_barx": frac_str(fwd),
        "ip_flux_forward": frac_str(w(bar) * fwd),
        "ip_flux_backward": frac_str(w(bar_x) * back),
        "balanced": w(bar) * fwd == w(bar_x) * back,
    }
    hat = EdgeSpinState(eta_bar, sigma_hat)
    contributions = [(t, r) for t, r in kernel.outgoing(hat) if t.eta == star_mask]
    block_sum_hat = sum((r for _, r in contributions), Fraction(0))
    block_sum_bar = sum((r for t, r in kernel.outgoing(bar) if t.eta == star_mask), Fraction(0))
    multi_flip = [t for t, _ in contributions if bin(t.sigma ^ sigma_hat).count("1") >= 2]
    step_c = {
        "edge_block_sum_from_sigma_hat": frac_str(block_sum_hat),
        "edge_block_sum_from_sigma_bar": frac_str(block_sum_bar),
        "targets": [dict(state_json(t, g), rate=frac_str(r)) for t, r in contributions],
        "multi_spin_targets": [state_json(t, g) for t in multi_flip],
        "contradiction": bool(multi_flip),
    }

    report = dream_report(kernel, params, g)
    premises = {
        "reversible": report.reversible,
        "spin_glauber": _combine("spin_glauber", report.spin_markov, report.glauber_type),
        "edge_markov": report.edge_markov,
    }
    first_failure = None
    for key, label in THEO1_PREMISES:
        if not premises[key].passed:
            first_failure = {"premise": key, "description": label, "witness": premises[key].witness}
            break
    return {
        "kernel": kernel.name,
        "x_bar": x,
        "sigma_bar": sigma_str(sigma_bar, g),
        "eta_bar": eta_str(eta_bar, g),
        "eta_bar_x": eta_str(star_mask, g),
        "sigma_hat": sigma_str(sigma_hat, g),
        "step_a": step_a,
        "step_b": step_b,
        "step_c": step_c,
        "premises": {k: v.verdict for k, v in premises.items()},
        "first_failing_premise": first_failure,
    }


def _combine(name, markov: Verdict, glauber: Verdict) -> Verdict:
    if not markov.passed:
        return Verdict(name, "fail", markov.witness)
    if not glauber.passed:
        return Verdict(name, "fail", glauber.witness)
    return Verdict(name, "pass", glauber.witness)


def moves_one_coordinate(kernel: TransitionKernel, states) -> tuple[bool, dict]:
    g = kernel.g
    for s in states:
        for t, r in kernel.outgoing(s):
            if t.eta != s.eta and t.sigma != s.sigma:
                return False, _pair(g, s, t, rate=r)
    return True, {}


def independence_check(kernel: TransitionKernel, params: CouplingParams, g: Graph,
                       weight=None, support="compatible") -> Verdict:
    """Joint lumpability versus product form of the stationary weight.

    Only meaningful for kernels that never move both coordinates at once.
    """
    states = resolve_support(support, g)
    ok, witness = moves_one_coordinate(kernel, states)
    if not ok:
        return Verdict("independence", "n/a", {"reason": "kernel moves both coordinates", **witness})
    weight = weight or ip_weight_fn(params, g)
    spin = check_lumpability(kernel, "spin", states)
    edge = check_lumpability(kernel, "edge", states)
    members = set(states)
    w = {s: weight(s) for s in states}
    total = sum(w.values(), Fraction(0))
    eta_marg = defaultdict(Fraction)
    sigma_marg = defaultdict(Fraction)
    for s, v in w.items():
        eta_marg[s.eta] += v
        sigma_marg[s.sigma] += v
    product_witness = {}
    for eta in sorted(eta_marg):
        for sigma in sorted(sigma_marg):
            s = EdgeSpinState(eta, sigma)
            joint = w[s] if s in members else Fraction(0)
            if joint * total != eta_marg[eta] * sigma_marg[sigma]:
                product_witness = {
                    "state": state_json(s, g),
                    "joint": frac_str(joint / total),
                    "product_of_marginals": frac_str(eta_marg[eta] * sigma_marg[sigma] / total ** 2),
                }
                break
        if product_witness:
            break
    both = spin.lumpable and edge.lumpable
    product = not product_witness
    return Verdict("independence", "pass" if both == product else "fail", {
        "spin_lumpable": spin.lumpable,
        "edge_lumpable": edge.lumpable,
        "product_measure": product,
        "product_witness": product_witness,
        "spin_witness": spin.witness,
        "edge_witness": edge.witness,
    })


def compatibility_scan(kernel: TransitionKernel) -> dict:
    """Exhaustive scan of transitions out of C and out of its complement."""
    g = kernel.g
    escapes = []
    incompatible_sources_moving = 0
    for s in enumerate_states(g, "full"):
        out = kernel.outgoing(s)
        if is_compatible(s, g):
            escapes.extend((s, t) for t, _ in out if not is_compatible(t, g))
        elif out:
            incompatible_sources_moving += 1
    return {
        "preserves_C": not escapes,
        "escape": _pair(g, *escapes[0]) if escapes else None,
        "incompatible_sources_with_moves": incompatible_sources_moving,
    }
