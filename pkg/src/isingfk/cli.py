"""Command-line entry point.

Exit codes: 0 success, 1 check failure, 2 usage/validation error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .configs import CapacityError, EdgeSpinState, parse_eta, parse_sigma, state_str
from .graph import Graph, GraphError, bundled_family, load_graph
from .kernels import KERNEL_NAMES, RepresentabilityError, make_kernel
from .measures import CouplingParams, parse_fraction
from .report import (
    CHECK_NAMES,
    build_report,
    default_checks,
    dumps,
    measure_report,
    report_matches_expectations,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    graph: Graph
    params: CouplingParams
    kernel: str | None = None
    support: str = "compatible"
    checks: list = field(default_factory=list)
    t_max: float = 10.0
    samples: int = 1
    seed: int = 0
    out: Path | None = None
    fmt: str = "json"
    jobs: int = 1


def resolve_graph(arg: str) -> Graph:
    path = Path(arg)
    if not path.exists() and arg in bundled_family():
        return bundled_family()[arg]
    if not path.exists():
        raise UsageError(f"graph file {arg} not found (bundled names: {', '.join(bundled_family())})")
    return load_graph(path)


def _params(text: str) -> CouplingParams:
    return CouplingParams(parse_fraction(text))


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise UsageError(f"seed must be an unsigned 64-bit integer, got {text}")
    return v


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _csv(rows) -> str:
    import csv
    import io

    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def cmd_measure(cfg: RunConfig) -> int:
    report = measure_report(cfg.graph, cfg.params)
    if cfg.fmt == "csv":
        rows = [("measure", "eta", "sigma", "weight", "probability")]
        rows += [("ip", r["eta"], r["sigma"], r["weight"], r["probability"]) for r in report["ip"]]
        rows += [("fk", r["eta"], "", r["weight"], r["probability"]) for r in report["fk"]]
        rows += [("ising", "", r["sigma"], r["weight"], r["probability"]) for r in report["ising"]]
        _emit(_csv(rows), cfg.out)
    else:
        _emit(dumps(report), cfg.out)
    return EXIT_OK


def cmd_check(cfg: RunConfig) -> int:
    from .report import run_checks

    kernel = make_kernel(cfg.kernel, cfg.params, cfg.graph)
    checks = cfg.checks or default_checks(cfg.kernel)
    unknown = [c for c in checks if c not in CHECK_NAMES]
    if unknown:
        raise UsageError(f"unknown check(s) {', '.join(unknown)}; choose from {', '.join(CHECK_NAMES)}")
    if cfg.jobs > 1 and len(checks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(cfg.jobs) as pool:
            parts = list(pool.map(run_checks, [kernel] * len(checks), [[c] for c in checks],
                                  [cfg.support] * len(checks)))
        support = parts[0][0]
        verdicts = [v for _, vs in parts for v in vs]
    else:
        support, verdicts = run_checks(kernel, checks, cfg.support)
    report = build_report(kernel, verdicts, support)
    if cfg.fmt == "csv":
        rows = [("name", "verdict", "expected")]
        rows += [(c["name"], c["verdict"], c["expected"] or "") for c in report["checks"]]
        _emit(_csv(rows), cfg.out)
    else:
        _emit(dumps(report), cfg.out)
    return EXIT_OK if report_matches_expectations(report) else EXIT_FAIL


def _initial_state(args, cfg: RunConfig, kernel, rng) -> EdgeSpinState:
    from .simulate import sample_ip

    if args.initial_eta is not None or args.initial_sigma is not None:
        eta = parse_eta(args.initial_eta, cfg.graph) if args.initial_eta is not None else 0
        sigma = parse_sigma(args.initial_sigma, cfg.graph) if args.initial_sigma is not None else 0
        return EdgeSpinState(eta, sigma)
    return sample_ip(cfg.graph, cfg.params, rng)


def cmd_simulate(cfg: RunConfig, args) -> int:
    from .simulate import GENERATOR_NAME, JumpChain, make_rng, write_trajectory_csv

    if cfg.samples < 1:
        raise UsageError("--samples must be at least 1")
    if not cfg.t_max > 0:
        raise UsageError("--t-max must be positive")
    if cfg.out is None:
        raise UsageError("simulate needs --out PATH for the trajectory CSV")
    kernel = make_kernel(cfg.kernel, cfg.params, cfg.graph)
    chain = JumpChain(kernel)
    out = cfg.out
    files = []
    for i in range(cfg.samples):
        rng = make_rng(cfg.seed, i)
        start = _initial_state(args, cfg, kernel, rng)
        traj = chain.run(start, cfg.t_max, rng)
        path = out if cfg.samples == 1 else out.with_name(f"{out.stem}_{i:04d}{out.suffix}")
        try:
            write_trajectory_csv(traj, cfg.graph, path)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from None
        files.append({"path": str(path), "initial": state_str(start, cfg.graph), "jumps": len(traj.jumps)})
    meta = {
        "kernel": kernel.name,
        "graph": cfg.graph.to_dict(),
        "p": f"{cfg.params.p.numerator}/{cfg.params.p.denominator}",
        "t_max": cfg.t_max,
        "seed": cfg.seed,
        "generator": GENERATOR_NAME,
        "version": __version__,
        "trajectories": files,
    }
    out.with_name(out.stem + ".meta.json").write_text(dumps(meta))
    return EXIT_OK


def cmd_estimate(cfg: RunConfig, args) -> int:
    from .analysis import conditional_rate_edge, conditional_rate_spin
    from .measures import frac_str
    from .simulate import estimate_conditional_flip_rate

    if cfg.samples < 1:
        raise UsageError("--samples must be at least 1")
    g = cfg.graph
    kernel = make_kernel(cfg.kernel, cfg.params, g)
    if args.sigma is not None:
        if args.site is None:
            raise UsageError("--sigma needs --site")
        sigma = parse_sigma(args.sigma, g)
        est = estimate_conditional_flip_rate(kernel, g, cfg.params, sigma=sigma, x=args.site, t=args.t,
                                             samples=cfg.samples, seed=cfg.seed, jobs=cfg.jobs)
        exact = conditional_rate_spin(kernel, cfg.params, g, sigma, args.site)
    elif args.eta is not None:
        if args.edge is None:
            raise UsageError("--eta needs --edge")
        eta = parse_eta(args.eta, g)
        est = estimate_conditional_flip_rate(kernel, g, cfg.params, eta=eta, e=args.edge, t=args.t,
                                             samples=cfg.samples, seed=cfg.seed, jobs=cfg.jobs)
        exact = conditional_rate_edge(kernel, cfg.params, g, eta, args.edge)
    else:
        raise UsageError("estimate needs --sigma/--site or --eta/--edge")
    payload = dict(est.to_json(), exact=frac_str(exact), within_tolerance=est.within(exact))
    _emit(dumps(payload), cfg.out)
    return EXIT_OK


def load_graph_family(path) -> dict[str, Graph]:
    data = json.loads(Path(path).read_text())
    if isinstance(data, list):
        return {f"g{i}": Graph.from_dict(d) for i, d in enumerate(data)}
    if isinstance(data, dict) and "vertices" in data:
        return {Path(path).stem: Graph.from_dict(data)}
    return {name: Graph.from_dict(d) for name, d in data.items()}


def cmd_verify(args) -> int:
    from .acceptance import DEFAULT_PS, run_all

    graphs = load_graph_family(args.graphs) if args.graphs else None
    results = run_all(graphs, DEFAULT_PS, quick=args.quick, jobs=args.jobs)
    for r in results:
        print(r.line())
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed" + (" (quick: Monte Carlo skipped)" if args.quick else ""))
    return EXIT_OK if passed == len(results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isingfk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, kernel=True):
        p.add_argument("--graph", required=True, help="graph JSON path or a bundled name (K2, P3, ...)")
        p.add_argument("--p", required=True, help="edge probability as a rational, e.g. 1/2")
        if kernel:
            p.add_argument("--kernel", required=True, choices=KERNEL_NAMES)
        p.add_argument("--out", type=Path)
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("measure", help="weight tables and partition identities")
    common(p, kernel=False)

    p = sub.add_parser("check", help="exact generator checks with a JSON report")
    common(p)
    p.add_argument("--check", action="append", default=[], dest="checks", metavar="NAME",
                   help=f"repeatable; one of {', '.join(CHECK_NAMES)}")
    p.add_argument("--support", choices=("compatible", "full"), default="compatible")
    p.add_argument("--projection", choices=("spin", "edge"),
                   help="shorthand for --check lumpability:PROJECTION")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("simulate", help="continuous-time trajectories to CSV")
    common(p)
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=1, help="number of independent trajectories")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--initial-eta")
    p.add_argument("--initial-sigma")

    p = sub.add_parser("estimate", help="Monte Carlo conditional flip rate vs the exact value")
    common(p)
    p.add_argument("--sigma")
    p.add_argument("--site", type=int)
    p.add_argument("--eta")
    p.add_argument("--edge", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--samples", type=int, default=20_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("verify", help="run the acceptance battery")
    p.add_argument("--quick", action="store_true", help="exact checks only")
    p.add_argument("--graphs", help="JSON file with a custom graph family")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        cfg = RunConfig(graph=resolve_graph(args.graph), params=_params(args.p))
        cfg.out = args.out
        cfg.fmt = args.format
        cfg.kernel = getattr(args, "kernel", None)
        cfg.jobs = getattr(args, "jobs", 1)
        if args.command == "measure":
            return cmd_measure(cfg)
        if args.command == "check":
            cfg.support = args.support
            cfg.checks = list(args.checks)
            if args.projection:
                cfg.checks.append(f"lumpability:{args.projection}")
            return cmd_check(cfg)
        cfg.samples, cfg.seed = args.samples, args.seed
        if args.command == "simulate":
            cfg.t_max = args.t_max
            return cmd_simulate(cfg, args)
        return cmd_estimate(cfg, args)
    except CapacityError as exc:
        print(f"isingfk: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (UsageError, GraphError, RepresentabilityError, ValueError, KeyError) as exc:
        print(f"isingfk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"isingfk: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
