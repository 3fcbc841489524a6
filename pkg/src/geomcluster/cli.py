"""Command-line entry point: ``geomcluster <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from .clustering import cluster, forest_height, strong_diameter, verify_tree_support
from .congestsim.core import SimulationError
from .distribution import GeomCapParams, sample_offsets
from .graph import Graph, load_edge_list, parse_gen_spec
from .ldd import estimate_cut_prob, ldd, ldd_params
from .spanner import build_spanner, spanner_params, verify_coverage, verify_stretch, write_spanner


class CheckFailed(Exception):
    pass


def _graph(args) -> Graph:
    if args.input:
        return load_edge_list(Path(args.input).read_text())
    return parse_gen_spec(args.gen)


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATH", help="edge-list file")
    src.add_argument("--gen", metavar="SPEC",
                     help="generator: er:n:p[:wmax[:seed]], grid:w:h[:wmax[:seed]], path:n, star:n, tree:n:seed")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")


def cmd_cluster(args) -> int:
    g = _graph(args)
    if args.k is not None:
        if not g.is_unweighted:
            raise CheckFailed("--k (spanner parameters) needs an unweighted graph")
        p, r = spanner_params(g.n, args.k)
        if g.n == 1:
            p = 0.5  # any valid p; a single vertex is one cluster regardless
    elif args.beta is not None:
        prm = ldd_params(args.beta, g.n)
        p, r = prm.p, prm.r
    else:
        if args.p is None or args.r is None:
            raise CheckFailed("give --k, --beta, or both --p and --r")
        p, r = args.p, args.r
    if args.dump_offsets:
        _emit(list(sample_offsets(GeomCapParams(p, r), g.n, args.seed).delta))
        return 0
    c = cluster(g, p, r, args.seed)
    if args.check:
        res = verify_tree_support(g, c)
        if not res.ok:
            raise CheckFailed(res.detail)
    _emit(c.to_json())
    return 0


def cmd_spanner(args) -> int:
    g = _graph(args)
    d = build_spanner(g, args.k, args.seed)
    failures = []
    max_stretch = None
    if args.check_coverage:
        res = verify_coverage(g, d)
        if not res.ok:
            failures.append(f"coverage: {res.detail}")
    if args.check_stretch:
        rep = verify_stretch(g, d.H, 2 * args.k - 1)
        max_stretch = rep.max_stretch if rep.max_stretch != float("inf") else None
        if not rep.ok:
            failures.append(f"stretch: edge {rep.worst_edge} has stretch {rep.max_stretch} > {2 * args.k - 1}")
    if args.format == "edge-list":
        sys.stdout.write(write_spanner(g, d))
    else:
        _emit(d.summary(g, max_stretch))
    if failures:
        raise CheckFailed(failures[0])
    return 0


def cmd_ldd(args) -> int:
    g = _graph(args)
    prm = ldd_params(args.beta, g.n)
    c = ldd(g, args.beta, args.seed)
    rep = strong_diameter(g, c)
    height = forest_height(g, c)
    out = {
        "n": g.n, "m": g.m, "beta": args.beta, "p": prm.p, "r": prm.r,
        "mode": c.mode,
        "clusters": len(c.centers()),
        "inter_cluster_edges": len(c.inter_cluster_edges(g)),
        "max_diameter": rep.max_diameter,
        "diameter_bound": 2 * prm.r,
        "forest_height": height,
    }
    if args.format == "csv":
        print(",".join(out))
        print(",".join(str(v) for v in out.values()))
    else:
        _emit(out)
    if rep.disconnected:
        raise CheckFailed(f"cluster {rep.disconnected[0]} is disconnected")
    if rep.max_diameter > 2 * prm.r:
        raise CheckFailed(f"strong diameter {rep.max_diameter} exceeds 2r = {2 * prm.r}")
    if height > prm.r:
        raise CheckFailed(f"support forest height {height} exceeds r = {prm.r}")
    return 0


def cmd_cutprob(args) -> int:
    g = _graph(args)
    stats = estimate_cut_prob(g, args.beta, args.trials, args.seed, args.workers)
    if args.format == "json":
        _emit(stats.to_json())
    else:
        sys.stdout.write(stats.to_csv())
    ok = stats.passes()
    if not ok.all():
        i = int((~ok).argmax())
        u, v, w = stats.edges[i]
        raise CheckFailed(
            f"edge ({u},{v}) cut with frequency {stats.frequency[i]:.4f} > bound "
            f"{stats.bounds()[i]:.4f} + margin {stats.margins()[i]:.4f}"
        )
    return 0


def cmd_sync(args) -> int:
    from .congestsim import (
        DistributedClustering, ExplicitDelays, FloodingBFS, LeaderElection, run_async, run_sync,
    )

    g = _graph(args)
    if args.program == "bfs":
        prog = FloodingBFS(args.source)
    elif args.program == "leader":
        prog = LeaderElection()
    else:
        if args.beta is not None:
            prm = ldd_params(args.beta, g.n)
            prog = DistributedClustering(prm.p, prm.r, args.seed)
        else:
            p, r = spanner_params(g.n, args.k)
            prog = DistributedClustering(p if g.n > 1 else 0.5, r, args.seed)
    schedule = None
    if args.schedule:
        schedule = ExplicitDelays.from_text(Path(args.schedule).read_text())
    ref = run_sync(prog, g)
    if args.sync == "none":
        tr = ref
    else:
        tr = run_async(prog, g, args.sync, schedule, gamma_k=args.k, seed=args.seed)
    if args.transcript:
        Path(args.transcript).write_text(tr.jsonl())
    summary = tr.summary()
    summary["matches_sync"] = tr.states == ref.states
    _emit(summary)
    if not summary["matches_sync"]:
        raise CheckFailed("asynchronous final states differ from the synchronous run")
    return 0


def cmd_verify(args) -> int:
    from .congestsim import DistributedClustering, reassemble, run_sync
    from .clustering import cluster_with_offsets
    from .graph import gen_random
    from .spanner import sparsify_vertex
    from .verify import apsp, brute_force_Cx, oracle_cluster_fractional

    rng = random.Random(args.seed)
    checked = {"oracle": 0, "tree_support": 0, "diameter": 0, "coverage": 0, "stretch": 0,
               "sparsifier": 0, "distributed": 0}
    for i in range(args.instances):
        n = rng.randint(1, args.n_max)
        weighted = rng.random() < 0.5
        g = gen_random(n, rng.uniform(0.02, 0.4), 3 if weighted else 1, rng.randrange(2**32))
        r = rng.randint(0, 8)
        delta = [rng.randint(0, r) for _ in range(n)]
        c = cluster_with_offsets(g, r, delta)
        o = oracle_cluster_fractional(g, r, delta)
        if (c.center, c.level) != (o.center, o.level):
            raise CheckFailed(f"instance {i}: oracle disagrees with cluster_with_offsets")
        checked["oracle"] += 1
        res = verify_tree_support(g, c)
        if not res.ok:
            raise CheckFailed(f"instance {i}: {res.detail}")
        checked["tree_support"] += 1
        rep = strong_diameter(g, c)
        if rep.disconnected or rep.max_diameter > 2 * r:
            raise CheckFailed(f"instance {i}: strong diameter {rep.max_diameter} > 2r = {2 * r}")
        checked["diameter"] += 1
        if not weighted:
            k = rng.choice([2, 3, 5])
            d = build_spanner(g, k, rng.randrange(2**32))
            cov = verify_coverage(g, d)
            if not cov.ok:
                raise CheckFailed(f"instance {i}: {cov.detail}")
            checked["coverage"] += 1
            st = verify_stretch(g, d.H, 2 * k - 1)
            if not st.ok:
                raise CheckFailed(f"instance {i}: stretch {st.max_stretch} > {2 * k - 1}")
            checked["stretch"] += 1
            if d.clustering.mode == "balls" and n <= 60:
                dist = apsp(g)
                for x in range(n):
                    extra = set(sparsify_vertex(g, d.clustering, x)) - brute_force_Cx(g, d.clustering, x, dist)
                    if extra:
                        raise CheckFailed(f"instance {i}: vertex {x} chose {sorted(extra)} outside C(x)")
                checked["sparsifier"] += 1
        p, rr, s = 0.5, rng.randint(0, 6), rng.randrange(2**32)
        seq = cluster(g, p, rr, s)
        dist_run = run_sync(DistributedClustering(p, rr, s), g)
        if reassemble(dist_run.states, rr, p, s, seq.mode) != seq:
            raise CheckFailed(f"instance {i}: distributed clustering differs from sequential")
        checked["distributed"] += 1
    _emit({"instances": args.instances, "checked": checked, "ok": True})
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="geomcluster", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="run the clustering and print it as JSON")
    _add_graph_args(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--k", type=int, help="spanner parameters p = 1 - n^(-1/k), r = k - 1")
    mode.add_argument("--beta", type=float, help="LDD parameters p = beta/4")
    p.add_argument("--p", type=float)
    p.add_argument("--r", type=int)
    p.add_argument("--dump-offsets", action="store_true", help="print the sampled offsets instead")
    p.add_argument("--check", action="store_true", help="verify tree support")
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("spanner", help="build a (2k-1)-spanner")
    _add_graph_args(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--check-stretch", action="store_true")
    p.add_argument("--check-coverage", action="store_true")
    p.add_argument("--format", choices=["json", "edge-list"], default="json")
    p.set_defaults(func=cmd_spanner)

    p = sub.add_parser("ldd", help="low-diameter decomposition with diameter check")
    _add_graph_args(p)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_ldd)

    p = sub.add_parser("cutprob", help="Monte Carlo estimate of per-edge cut probability")
    _add_graph_args(p)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_cutprob)

    p = sub.add_parser("sync", help="run a demo program under a synchronizer")
    _add_graph_args(p)
    p.add_argument("--program", choices=["bfs", "leader", "cluster"], default="bfs")
    p.add_argument("--sync", choices=["none", "alpha", "beta", "gamma"], default="alpha")
    p.add_argument("--k", type=int, default=3, help="k for gamma's decomposition and the cluster program")
    p.add_argument("--beta", type=float, help="run the cluster program with LDD parameters")
    p.add_argument("--source", type=int, default=0, help="BFS source")
    p.add_argument("--schedule", metavar="PATH", help="delay file with lines 'msg_index delay'")
    p.add_argument("--transcript", metavar="PATH", help="write the event log as JSON lines")
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_sync)

    p = sub.add_parser("verify", help="oracle and invariant checks on random instances")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--n-max", type=int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, SimulationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
