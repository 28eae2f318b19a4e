"""The verification battery run by ``isingfk verify`` and tests/test_acceptance.py.

Each criterion returns a ``CriterionResult``; exact criteria compare rationals
with zero tolerance, Monte Carlo criteria use 3 standard errors plus the
finite-t bias allowance.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

from . import analysis as an
from .configs import EdgeSpinState, enumerate_states, flip_spin, toggle_edge
from .graph import Graph, bundled_family, complete2, path, star
from .kernels import COUPLED_KERNELS, make_kernel
from .measures import CouplingParams, fk_weight, ip_table, ising_weight, partition_identities
from .report import build_report, validate_report
from .simulate import (
    JumpChain,
    estimate_conditional_flip_rate,
    make_rng,
    occupation_distribution,
    sample_ip,
    total_variation,
)

DEFAULT_PS = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3))
HALF = Fraction(1, 2)
MC_SAMPLES = 20_000
TV_LIMIT = 0.05


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    exact: bool = True

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number:>2}: {self.title} ({self.seconds:.1f}s) {self.detail}"


def _cases(graphs, ps):
    for gname, g in graphs.items():
        for p in ps:
            yield gname, g, CouplingParams(p)


def _fail(gname, p, what):
    return f"{gname} p={p.p}: {what}"


def criterion_1(graphs, ps):
    """Exact detailed balance of the coupled kernels w.r.t. IP on C."""
    for gname, g, params in _cases(graphs, ps):
        states = enumerate_states(g, "compatible")
        w = an.ip_weight_fn(params, g)
        for name in COUPLED_KERNELS:
            v = an.check_detailed_balance(make_kernel(name, params, g), w, states)
            if not v.passed:
                return False, _fail(gname, params, f"{name} violates detailed balance: {v.witness}")
    return True, f"{len(COUPLED_KERNELS)} kernels x {len(graphs)} graphs x {len(ps)} p"


def criterion_2(graphs, ps):
    """Exact stationarity of IP on C, independent of detailed balance."""
    for gname, g, params in _cases(graphs, ps):
        states = enumerate_states(g, "compatible")
        w = an.ip_weight_fn(params, g)
        for name in COUPLED_KERNELS:
            v = an.check_stationarity(make_kernel(name, params, g), w, states)
            if not v.passed:
                return False, _fail(gname, params, f"{name} not stationary: {v.witness}")
    return True, "global balance holds everywhere"


def criterion_3(graphs, ps):
    """Reference single-coordinate kernels; the printed heat-bath rate fails."""
    from .configs import edge_states, spin_states

    for gname, g, params in _cases(graphs, ps):
        spins = spin_states(g)
        for variant in ("metropolis", "heatbath", "edgeweight"):
            k = make_kernel(f"glauber:{variant}", params, g)
            v = an.check_detailed_balance(k, an.ising_weight_fn(params, g), spins)
            if not v.passed:
                return False, _fail(gname, params, f"glauber:{variant}: {v.witness}")
        v = an.check_detailed_balance(make_kernel("fk", params, g), an.fk_weight_fn(params, g), edge_states(g))
        if not v.passed:
            return False, _fail(gname, params, f"fk: {v.witness}")
    g, params = complete2(), CouplingParams(HALF)
    k = make_kernel("glauber:heatbath-printed", params, g)
    v = an.check_detailed_balance(k, an.ising_weight_fn(params, g), spin_states(g))
    if v.passed or not v.witness:
        return False, "printed heat-bath rate unexpectedly reversible on K2 at p=1/2"
    return True, f"printed heat-bath witness {v.witness}"


def criterion_4(graphs, ps):
    """Marginals of IP are the FK and Ising weights; Z = Z_RC."""
    for gname, g, params in _cases(graphs, ps):
        table = ip_table(g, params).weights
        for eta in range(1 << g.m):
            col = sum((table[EdgeSpinState(eta, s)] for s in range(1 << g.n)), Fraction(0))
            if col != fk_weight(eta, params, g):
                return False, _fail(gname, params, f"edge marginal differs at eta={eta}")
        for sigma in range(1 << g.n):
            row = sum((table[EdgeSpinState(h, sigma)] for h in range(1 << g.m)), Fraction(0))
            if row != ising_weight(sigma, params, g):
                return False, _fail(gname, params, f"spin marginal differs at sigma={sigma}")
        ids = partition_identities(g, params)
        if not ids.exact:
            return False, _fail(gname, params, f"partition residuals {ids.residuals}")
    return True, "all residuals exactly zero"


def criterion_5(graphs, ps):
    """Lumpability verdict matrix with exact lumped rates."""
    for gname, g, params in _cases(graphs, ps):
        states = enumerate_states(g, "compatible")
        k = {name: make_kernel(name, params, g) for name in COUPLED_KERNELS}
        site_spin = an.check_lumpability(k["site-star"], "spin", states)
        if not site_spin.lumpable:
            return False, _fail(gname, params, f"site-star spin marginal not lumpable: {site_spin.witness}")
        expected = {
            (s, flip_spin(s, x)): an.glauber_marginal_rate(params, g, s, x)
            for s in range(1 << g.n) for x in range(g.n)
        }
        if site_spin.rates != expected:
            return False, _fail(gname, params, "site-star lumped spin rates differ from (1-p)^aligned")
        cf_edge = an.check_lumpability(k["cluster-flip"], "edge", states)
        if not cf_edge.lumpable:
            return False, _fail(gname, params, f"cluster-flip edge marginal not lumpable: {cf_edge.witness}")
        expected = {
            (h, toggle_edge(h, e)): an.fk_marginal_rate(params, g, h, e)
            for h in range(1 << g.m) for e in range(g.m)
        }
        if cf_edge.rates != expected:
            return False, _fail(gname, params, "cluster-flip lumped edge rates differ from FK rates")
        for name, proj in (("one-change", "spin"), ("one-change", "edge"),
                           ("site-star", "edge"), ("cluster-flip", "spin")):
            res = an.check_lumpability(k[name], proj, states)
            if res.lumpable or not res.witness:
                return False, _fail(gname, params, f"{name} {proj} projection unexpectedly lumpable")
    return True, "matrix matches; lumped rates exact"


def criterion_6(graphs, ps):
    """Conditional infinitesimal rates against closed forms."""
    for gname, g, params in _cases(graphs, ps):
        one = make_kernel("one-change", params, g)
        es = make_kernel("edge-spin", params, g)
        for sigma in range(1 << g.n):
            for x in range(g.n):
                got = an.conditional_rate_spin(one, params, g, sigma, x)
                if got != an.glauber_marginal_rate(params, g, sigma, x):
                    return False, _fail(gname, params, f"one-change spin rate sigma={sigma} x={x}: {got}")
                got = an.conditional_rate_spin(es, params, g, sigma, x)
                if got != an.edge_spin_conditional_rate(params, g, sigma, x):
                    return False, _fail(gname, params, f"edge-spin spin rate sigma={sigma} x={x}: {got}")
        for eta in range(1 << g.m):
            for e in range(g.m):
                got = an.conditional_rate_edge(one, params, g, eta, e)
                if got != an.fk_marginal_rate(params, g, eta, e):
                    return False, _fail(gname, params, f"one-change edge rate eta={eta} e={e}: {got}")
    return True, "all (state, site/edge) pairs exact"


def criterion_7(graphs=None, ps=None):
    """Edge-spin edge marginal: definitive verdict, schema-valid report."""
    import jsonschema

    details = []
    for gname, g in (("P3", path(3)), ("K13", star(3))):
        params = CouplingParams(HALF)
        kernel = make_kernel("edge-spin", params, g)
        res = an.check_lumpability(kernel, "edge", enumerate_states(g, "compatible"))
        verdict = res.verdict()
        if not (verdict.witness.get("lumped_rates") or verdict.witness.get("state_a")):
            return False, f"{gname}: verdict without witness or rates"
        report = build_report(kernel, [verdict], "compatible")
        try:
            validate_report(report)
        except jsonschema.ValidationError as exc:
            return False, f"{gname}: report invalid: {exc.message}"
        details.append(f"{gname}: {'lumpable' if res.lumpable else 'NOT lumpable'}")
    return True, "; ".join(details)


def criterion_8(graphs=None, ps=None):
    """Impossibility chain on K_{1,4}: each coupled kernel breaks a named premise."""
    g, params = star(4), CouplingParams(HALF)
    names = []
    for name in COUPLED_KERNELS:
        rep = an.theo1_witness(make_kernel(name, params, g), params, g)
        first = rep["first_failing_premise"]
        if first is None:
            return False, f"{name} satisfies every dream premise"
        names.append(f"{name}->{first['premise']}")
    return True, ", ".join(names)


def mc_cases():
    """(graph name, graph, kernel, kind, conditioning value, site/edge) at p=1/2."""
    out = []
    for gname, g in (("K2", complete2()), ("P3", path(3))):
        allplus = (1 << g.n) - 1
        out.append((gname, g, "one-change", "spin", allplus, 0))
        out.append((gname, g, "one-change", "spin", 0b01, 1))
        out.append((gname, g, "edge-spin", "spin", allplus, 0))
        out.append((gname, g, "one-change", "edge", 0, 0))
        out.append((gname, g, "one-change", "edge", 1, 0))
    return out


def criterion_9(graphs=None, ps=None, samples=MC_SAMPLES, seed=20240611):
    """Monte Carlo rate estimates and long-run occupation vs exact values."""
    params = CouplingParams(HALF)
    lines = []
    for i, (gname, g, kname, kind, value, site) in enumerate(mc_cases()):
        kernel = make_kernel(kname, params, g)
        if kind == "spin":
            exact = an.conditional_rate_spin(kernel, params, g, value, site)
            est = estimate_conditional_flip_rate(kernel, g, params, sigma=value, x=site,
                                                 samples=samples, seed=seed + i)
        else:
            exact = an.conditional_rate_edge(kernel, params, g, value, site)
            est = estimate_conditional_flip_rate(kernel, g, params, eta=value, e=site,
                                                 samples=samples, seed=seed + i)
        if not est.within(exact):
            return False, (f"{gname} {kname} {kind}: estimate {est.estimate:.4f} +- {est.standard_error:.4f} "
                           f"vs exact {float(exact):.4f}")
        lines.append(f"{gname}/{kname}/{kind}:{est.estimate:.3f}~{float(exact):.3f}")
    g = complete2()
    kernel = make_kernel("one-change", params, g)
    states = enumerate_states(g, "compatible")
    mean_hold = max(1 / float(kernel.total_rate(s)) for s in states)
    t_max = 1e4 * mean_hold
    rng = make_rng(seed)
    start = sample_ip(g, params, rng)
    traj = JumpChain(kernel).run(start, t_max, rng)
    table = ip_table(g, params)
    target = {s: float(w) for s, w in table.normalized().items() if w}
    tv = total_variation(occupation_distribution(traj), target)
    if tv > TV_LIMIT:
        return False, f"occupation TV {tv:.4f} > {TV_LIMIT}"
    return True, f"{len(lines)} estimates within 3 SE; TV={tv:.4f} over t_max={t_max:.0f}"


def criterion_10(graphs, ps):
    """C is preserved; cluster kernels give incompatible sources no moves; irreducible on C."""
    for gname, g, params in _cases(graphs, ps):
        states = enumerate_states(g, "compatible")
        for name in COUPLED_KERNELS:
            kernel = make_kernel(name, params, g)
            scan = an.compatibility_scan(kernel)
            if not scan["preserves_C"]:
                return False, _fail(gname, params, f"{name} leaves C: {scan['escape']}")
            if name in ("cluster-flip", "edge-spin") and scan["incompatible_sources_with_moves"]:
                return False, _fail(gname, params, f"{name} moves from incompatible states")
            v = an.check_irreducible(kernel, states)
            if not v.passed:
                return False, _fail(gname, params, f"{name} reducible on C: {v.witness}")
    return True, "C closed under every kernel; all irreducible on C"


CRITERIA = {
    1: ("exact detailed balance w.r.t. IP on C", criterion_1, True),
    2: ("exact stationarity of IP on C", criterion_2, True),
    3: ("reference Glauber/FK kernels; printed heat bath fails", criterion_3, True),
    4: ("marginal-measure and partition identities", criterion_4, True),
    5: ("lumpability verdict matrix", criterion_5, True),
    6: ("conditional infinitesimal rates", criterion_6, True),
    7: ("edge-spin edge-marginal adjudication", criterion_7, True),
    8: ("impossibility witness on K_{1,4}", criterion_8, True),
    9: ("Monte Carlo cross-checks", criterion_9, False),
    10: ("compatibility preservation and irreducibility", criterion_10, True),
}


def run_criterion(number: int, graphs: dict[str, Graph] | None = None, ps=DEFAULT_PS) -> CriterionResult:
    graphs = graphs or bundled_family()
    title, fn, exact = CRITERIA[number]
    t0 = time.perf_counter()
    try:
        ok, detail = fn(graphs, ps)
    except Exception as exc:  # a crash is a failed criterion, reported with its cause
        ok, detail = False, f"error: {type(exc).__name__}: {exc}"
    return CriterionResult(number, title, ok, detail, time.perf_counter() - t0, exact)


def run_all(graphs=None, ps=DEFAULT_PS, quick=False, jobs=1) -> list[CriterionResult]:
    numbers = [n for n, (_, _, exact) in CRITERIA.items() if exact or not quick]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as pool:
            futures = [pool.submit(run_criterion, n, graphs, ps) for n in numbers]
            return [f.result() for f in futures]
    return [run_criterion(n, graphs, ps) for n in numbers]
