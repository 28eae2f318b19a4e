"""Continuous-time Monte Carlo for any kernel, plus empirical rate estimates.

Random numbers come from numpy's PCG64 bit generator.  Replicate ``i`` of a
run seeded with ``seed`` draws from ``SeedSequence([seed, i])`` so results do
not depend on how replicates are scheduled.  Rates are converted to floats
only here; reference values elsewhere stay rational.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .configs import EdgeSpinState, enumerate_states, eta_str, flip_spin, sigma_str, toggle_edge
from .graph import Graph
from .kernels import TransitionKernel, make_kernel
from .measures import CouplingParams

GENERATOR_NAME = "numpy.random.PCG64"
DEFAULT_TRIAL_CAP = 10 ** 7
MULTI_JUMP_TARGET = 1e-3
_BATCH = 64


class SamplingError(RuntimeError):
    pass


def make_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    entropy = [seed] if stream is None else [seed, stream]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


class _Endpoints:
    def __init__(self, g: Graph):
        self.u = np.array([u for u, _ in g.edges])
        self.v = np.array([v for _, v in g.edges])
        self.edge_weights = 1 << np.arange(g.m, dtype=np.int64)
        self.vertex_weights = 1 << np.arange(g.n, dtype=np.int64)


def _candidates(g, params, rng, ends, size):
    eta = rng.random((size, g.m)) < float(params.p)
    sigma = rng.random((size, g.n)) < 0.5
    bad = eta & (sigma[:, ends.u] != sigma[:, ends.v])
    ok = ~bad.any(axis=1)
    return eta @ ends.edge_weights, sigma @ ends.vertex_weights, ok


def sample_ip(g: Graph, params: CouplingParams, rng: np.random.Generator,
              sigma: int | None = None, eta: int | None = None,
              max_trials: int = DEFAULT_TRIAL_CAP) -> EdgeSpinState:
    """Exact IP draw by rejection from Bernoulli(p) edges and fair spins.

    Passing ``sigma`` or ``eta`` conditions on that coordinate, again by rejection.
    """
    ends = _Endpoints(g)
    trials = 0
    while trials < max_trials:
        size = min(_BATCH, max_trials - trials)
        etas, sigmas, ok = _candidates(g, params, rng, ends, size)
        if sigma is not None:
            ok &= sigmas == sigma
        if eta is not None:
            ok &= etas == eta
        hits = np.flatnonzero(ok)
        if hits.size:
            i = hits[0]
            return EdgeSpinState(int(etas[i]), int(sigmas[i]))
        trials += size
    raise SamplingError(f"no acceptable IP sample within {max_trials} trials")


@dataclass
class Trajectory:
    initial: EdgeSpinState
    jumps: list = field(default_factory=list)  # (time, state)
    t_max: float = 0.0

    def state_at(self, t: float) -> EdgeSpinState:
        state = self.initial
        for time, s in self.jumps:
            if time > t:
                break
            state = s
        return state

    def states(self):
        yield self.initial
        for _, s in self.jumps:
            yield s

    def occupation(self) -> dict:
        """Time spent in each state over [0, t_max]."""
        occ = {}
        last_t, state = 0.0, self.initial
        for time, s in self.jumps:
            occ[state] = occ.get(state, 0.0) + time - last_t
            last_t, state = time, s
        occ[state] = occ.get(state, 0.0) + self.t_max - last_t
        return occ


class JumpChain:
    """Float view of a kernel: cached totals and cumulative rates per state."""

    def __init__(self, kernel: TransitionKernel):
        self.kernel = kernel
        self._cache = {}

    def entry(self, s):
        try:
            return self._cache[s]
        except KeyError:
            out = self.kernel.outgoing(s)
            targets = [t for t, _ in out]
            cum = np.cumsum([float(r) for _, r in out]) if out else np.zeros(0)
            total = float(cum[-1]) if out else 0.0
            self._cache[s] = (targets, cum, total)
            return self._cache[s]

    def run(self, initial, t_max, rng) -> Trajectory:
        traj = Trajectory(initial, [], t_max)
        t, state = 0.0, initial
        while True:
            targets, cum, total = self.entry(state)
            if total <= 0.0:
                break
            t += rng.exponential(1.0 / total)
            if t > t_max:
                break
            k = int(np.searchsorted(cum, rng.random() * total, side="right"))
            state = targets[min(k, len(targets) - 1)]
            traj.jumps.append((t, state))
        return traj

    def state_after(self, initial, t_max, rng):
        t, state = 0.0, initial
        while True:
            targets, cum, total = self.entry(state)
            if total <= 0.0:
                return state
            t += rng.exponential(1.0 / total)
            if t > t_max:
                return state
            k = int(np.searchsorted(cum, rng.random() * total, side="right"))
            state = targets[min(k, len(targets) - 1)]


def run_trajectory(kernel: TransitionKernel, initial: EdgeSpinState, t_max: float,
                   rng: np.random.Generator) -> Trajectory:
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    return JumpChain(kernel).run(initial, t_max, rng)


def max_total_rate(kernel: TransitionKernel, support="compatible") -> float:
    states = enumerate_states(kernel.g, support)
    return max(float(kernel.total_rate(s)) for s in states)


def default_time_step(kernel: TransitionKernel) -> float:
    """Largest t with (t * max total rate)**2 / 2 below the multiple-jump target."""
    return math.sqrt(2 * MULTI_JUMP_TARGET) / max_total_rate(kernel)


@dataclass
class RateEstimate:
    estimate: float
    standard_error: float
    samples: int
    hits: int
    t: float
    seed: int
    bias_allowance: float

    def within(self, exact, n_se: float = 3.0) -> bool:
        return abs(self.estimate - float(exact)) <= n_se * self.standard_error + self.bias_allowance

    def to_json(self) -> dict:
        return {
            "estimate": self.estimate,
            "standard_error": self.standard_error,
            "samples": self.samples,
            "hits": self.hits,
            "t": self.t,
            "seed": self.seed,
            "bias_allowance": self.bias_allowance,
            "generator": GENERATOR_NAME,
        }


def _count_hits(kernel_name, p, g, sigma, x, eta, e, t, seed, start, stop, max_trials):
    params = CouplingParams(p)
    chain = JumpChain(make_kernel(kernel_name, params, g))
    hits = 0
    for i in range(start, stop):
        rng = make_rng(seed, i)
        s0 = sample_ip(g, params, rng, sigma=sigma, eta=eta, max_trials=max_trials)
        s1 = chain.state_after(s0, t, rng)
        if sigma is not None:
            hits += s1.sigma == flip_spin(sigma, x)
        else:
            hits += s1.eta == toggle_edge(eta, e)
    return hits


def estimate_conditional_flip_rate(kernel: TransitionKernel, g: Graph, params: CouplingParams, *,
                                   sigma: int | None = None, x: int | None = None,
                                   eta: int | None = None, e: int | None = None,
                                   t: float | None = None, samples: int = 20_000, seed: int = 0,
                                   jobs: int = 1, max_trials: int = DEFAULT_TRIAL_CAP) -> RateEstimate:
    """Estimate lim P(coordinate flips by t | coordinate) / t starting from IP.

    Give either (sigma, x) for a spin flip or (eta, e) for an edge toggle.
    """
    if (sigma is None) == (eta is None):
        raise ValueError("condition on exactly one of sigma or eta")
    if sigma is not None and x is None or eta is not None and e is None:
        raise ValueError("spin estimates need x, edge estimates need e")
    if samples < 1:
        raise ValueError("samples must be positive")
    lam = max_total_rate(kernel)
    if t is None:
        t = math.sqrt(2 * MULTI_JUMP_TARGET) / lam
    args = (kernel.name, kernel.params.p, g, sigma, x, eta, e, t, seed)
    if jobs > 1:
        bounds = np.linspace(0, samples, jobs + 1).astype(int)
        with ProcessPoolExecutor(jobs) as pool:
            futures = [pool.submit(_count_hits, *args, a, b, max_trials) for a, b in zip(bounds, bounds[1:])]
            hits = sum(f.result() for f in futures)
    else:
        hits = _count_hits(*args, 0, samples, max_trials)
    frac = hits / samples
    se = math.sqrt(max(frac * (1 - frac), 1.0 / samples) / samples) / t
    return RateEstimate(frac / t, se, samples, hits, t, seed, t * lam ** 2)


def occupation_distribution(traj: Trajectory) -> dict:
    occ = traj.occupation()
    total = sum(occ.values())
    return {s: v / total for s, v in occ.items()}


def total_variation(a: dict, b: dict) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(float(a.get(k, 0.0)) - float(b.get(k, 0.0))) for k in keys)


def write_trajectory_csv(traj: Trajectory, g: Graph, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "eta", "sigma"])
        w.writerow([repr(0.0), eta_str(traj.initial.eta, g), sigma_str(traj.initial.sigma, g)])
        for time, s in traj.jumps:
            w.writerow([repr(time), eta_str(s.eta, g), sigma_str(s.sigma, g)])
