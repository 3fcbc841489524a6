"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records a one-line verdict in ``conftest.ACCEPTANCE``; the lines are
printed in the terminal summary (and immediately with ``pytest -s``).
"""
import random

import numpy as np
import pytest
from scipy import stats

from conftest import ACCEPTANCE, random_instance
from geomcluster.clustering import (
    cluster,
    cluster_with_offsets,
    forest_height,
    strong_diameter,
    verify_tree_support,
)
from geomcluster.congestsim import (
    DistributedClustering,
    FloodingBFS,
    LeaderElection,
    SeededDelays,
    gamma_init,
    neighbor_knowledge,
    reassemble,
    run_async,
    run_sync,
)
from geomcluster.distribution import (
    GeomCapParams,
    geom_cap_pmf,
    geom_cap_tail,
    sample_offsets,
)
from geomcluster.graph import gen_grid, gen_random
from geomcluster.ldd import estimate_cut_prob, ldd, ldd_params
from geomcluster.spanner import (
    build_spanner,
    mean_ci95,
    sparsify_vertex,
    spanner_params,
    verify_coverage,
    verify_stretch,
)
from geomcluster.verify import apsp, brute_force_Cx, oracle_cluster_fractional

pytestmark = pytest.mark.acceptance

# Message bound for gamma's initialization, derived from the protocol: k+1 pulses,
# at most one broadcast per node per pulse plus one F announcement, each
# acknowledged, plus 2m SAFE messages per pulse: m(6k + 10) <= 11 km for k >= 2.
INIT_MESSAGE_CONSTANT = 11


def record(num: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[num] = (ok, detail)
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def er_instances():
    # 100 graphs: n=200, half at edge_prob 0.05 and half at 0.2
    for i in range(100):
        yield i, gen_random(200, 0.05 if i % 2 == 0 else 0.2, 1, 1000 + i)


def test_criterion_01_stretch():
    failures, runs, worst = 0, 0, 0.0
    for k in (2, 3, 5):
        for i, g in er_instances():
            d = build_spanner(g, k, seed=i)
            rep = verify_stretch(g, d.H, 2 * k - 1)
            runs += 1
            worst = max(worst, rep.max_stretch / (2 * k - 1))
            failures += not rep.ok
    record(1, failures == 0,
           f"{runs} spanner runs, {failures} with stretch > 2k-1 (worst stretch/(2k-1) = {worst:.3f})")


def test_criterion_02_strong_diameter():
    failures, runs = [], 0

    def check(g, c, label):
        nonlocal runs
        runs += 1
        rep = strong_diameter(g, c)
        h = forest_height(g, c)
        tree = verify_tree_support(g, c)
        if rep.disconnected or rep.max_diameter > 2 * c.r or h > c.r or not tree.ok:
            failures.append(f"{label}: diam={rep.max_diameter} height={h} r={c.r} {tree.detail}")

    for k in (2, 3, 5):
        for i, g in er_instances():
            check(g, build_spanner(g, k, seed=i).clustering, f"spanner k={k} graph {i}")
    for beta in (0.3, 0.6):
        for i, g in er_instances():
            check(g, ldd(g, beta, seed=i), f"ldd beta={beta} graph {i}")
            gw = gen_random(200, 0.05 if i % 2 == 0 else 0.2, 3, 2000 + i)
            check(gw, ldd(gw, beta, seed=i), f"weighted ldd beta={beta} graph {i}")
    record(2, not failures, f"{runs} clusterings checked, {len(failures)} violations"
           + (f"; first: {failures[0]}" if failures else ""))


def test_criterion_03_expected_size():
    n, k = 256, 2
    sizes_F, sizes_H = [], []
    for seed in range(200):
        g = gen_random(n, 0.25, 1, 5000 + seed)
        d = build_spanner(g, k, seed)
        sizes_F.append(d.size_F)
        sizes_H.append(d.size_H)
    bound_F = 2 * n ** 1.5
    bound_H = 2 * n ** 1.5 + n
    mF, loF, hiF = mean_ci95(sizes_F)
    mH, loH, hiH = mean_ci95(sizes_H)
    ok = loF <= bound_F and loH <= bound_H and mF <= bound_F and mH <= bound_H
    record(3, ok,
           f"mean |F| = {mF:.1f} (95% CI [{loF:.1f}, {hiF:.1f}]) vs {bound_F:.0f}; "
           f"mean |H| = {mH:.1f} (95% CI [{loH:.1f}, {hiH:.1f}]) vs {bound_H:.0f}")


def test_criterion_04_cut_probability():
    trials = 3000
    g = gen_grid(8, 8, 3, seed=7)
    assert {w for _, _, w in g.edges} == {1, 2, 3}
    parts, ok = [], True
    for beta in (0.1, 0.3):
        st = estimate_cut_prob(g, beta, trials, seed=11, workers=2)
        live = ~st.vacuous()
        per_edge = bool(st.passes()[live].all())
        agg = st.expected_cut_weight <= 1.1 * st.aggregate_bound
        ok &= per_edge and agg
        slack = (st.bounds() + st.margins() - st.frequency)[live]
        r = ldd_params(beta, g.n).r
        mode = "components fallback, " if r >= g.n * g.w_max else ""
        parts.append(
            f"beta={beta}: r={r}, {mode}{int(live.sum())} live edges, "
            f"min slack {slack.min():.4f}, sum freq {st.expected_cut_weight:.2f} "
            f"<= 1.1*{st.aggregate_bound:.1f}"
        )
    record(4, ok, "; ".join(parts))


def test_criterion_05_round_bound():
    rng = random.Random(5)
    runs, failures = 0, []
    configs = [("k", 2), ("k", 3), ("k", 5), ("beta", 0.3)]
    for kind, val in configs:
        for _ in range(100):
            seed = rng.randrange(2**32)
            if kind == "k":
                g = random_instance(rng, 120, weighted=False)
                p, r = spanner_params(g.n, val)
                p = p if g.n > 1 else 0.5
            else:
                g = random_instance(rng, 64)
                prm = ldd_params(val, g.n)
                p, r = prm.p, prm.r
            prog = DistributedClustering(p, r, seed)
            # run_sync enforces the round limit and the bit budget of every payload
            tr = run_sync(prog, g, max_rounds=r + 1)
            runs += 1
            if tr.counters.rounds > r + 1:
                failures.append(f"{kind}={val} n={g.n}: {tr.counters.rounds} rounds > {r + 1}")
    record(5, not failures, f"{runs} distributed runs halted by round r+1 within the bit budget"
           if not failures else failures[0])


def test_criterion_06_distributed_equivalence():
    rng = random.Random(6)
    mismatches = []
    for i in range(100):
        seed = rng.randrange(2**32)
        if i % 2 == 0:
            g = random_instance(rng, 80, weighted=False, n_min=2)
            p, r = spanner_params(g.n, rng.choice([2, 3, 5]))
        else:
            g = random_instance(rng, 64, weighted=True)
            prm = ldd_params(rng.choice([0.3, 0.6, 0.9]), g.n)
            p, r = prm.p, prm.r
        seq = cluster(g, p, r, seed)
        tr = run_sync(DistributedClustering(p, r, seed), g)
        dist = reassemble(tr.states, r, p, seed, seq.mode)
        knowledge = neighbor_knowledge(tr.states)
        expected = [{y: (seq.level[y], seq.center[y]) for y, _ in g.adj[x]} for x in range(g.n)]
        if (dist.center, dist.level, dist.parent) != (seq.center, seq.level, seq.parent):
            mismatches.append(f"instance {i}: clustering differs")
        elif knowledge != expected:
            mismatches.append(f"instance {i}: neighbor knowledge differs")
    record(6, not mismatches, "100 (G, seed) pairs, center/level/parent/neighbor knowledge identical"
           if not mismatches else mismatches[0])


def test_criterion_07_oracle_equivalence():
    rng = random.Random(7)
    mismatches, weighted_count = [], 0
    for i in range(500):
        weighted = i % 2 == 1
        weighted_count += weighted
        g = random_instance(rng, 200, weighted=weighted)
        r = rng.randint(0, 12)
        if r == 0:
            delta = [0] * g.n
        else:
            delta = sample_offsets(GeomCapParams(rng.uniform(0.05, 0.95), r), g.n, rng.randrange(2**32))
        c = cluster_with_offsets(g, r, delta)
        o = oracle_cluster_fractional(g, r, delta)
        if (c.center, c.level) != (o.center, o.level):
            mismatches.append(f"instance {i} (n={g.n}, r={r})")
    record(7, not mismatches, f"500 instances ({weighted_count} weighted) match the oracle exactly"
           if not mismatches else f"mismatch on {mismatches[0]}")


def test_criterion_08_sparsifier_fidelity():
    rng = random.Random(8)
    violations, contained_checked = [], 0
    for i in range(200):
        g = random_instance(rng, 60, weighted=False, n_min=8)
        k = rng.choice([2, 3, 5])
        d = build_spanner(g, k, rng.randrange(2**32))
        cov = verify_coverage(g, d)
        if not cov.ok:
            violations.append(f"instance {i}: {cov.detail}")
            continue
        c = d.clustering
        if c.mode != "balls":
            continue
        dist = apsp(g)
        for x in range(g.n):
            extra = set(sparsify_vertex(g, c, x)) - brute_force_Cx(g, c, x, dist)
            if extra:
                violations.append(f"instance {i}: vertex {x} emitted {sorted(extra)} outside C(x)")
                break
        contained_checked += 1
    fallback = 200 - contained_checked
    record(8, not violations,
           f"coverage on 200 instances, containment on {contained_checked}"
           + (f" ({fallback} used the components fallback)" if fallback else "")
           if not violations else violations[0])


def test_criterion_09_synchronizers():
    rng = random.Random(9)
    k = 3
    mismatches, gamma_over = [], []
    init_constants = []
    runs = 0
    for prog_name in ("bfs", "leader"):
        for s in range(100):
            g = random_instance(rng, 24, n_min=2)
            prog = FloodingBFS(rng.randrange(g.n)) if prog_name == "bfs" else LeaderElection()
            ref = run_sync(prog, g).states
            seed = rng.randrange(2**32)
            decomp, init = gamma_init(g.unweighted(), k, seed, SeededDelays(seed + 1))
            if g.m:
                init_constants.append(init.message_constant)
            for sync in ("alpha", "beta", "gamma"):
                tr = run_async(prog, g, sync, SeededDelays(seed), gamma_decomp=decomp, record=False)
                runs += 1
                if tr.states != ref:
                    mismatches.append(f"{prog_name}/{sync} schedule {s}")
                if sync == "gamma":
                    bound = 4 * tr.counters.rounds * (decomp.size_F + g.n)
                    if tr.counters.sync_msgs > bound:
                        gamma_over.append(f"{tr.counters.sync_msgs} > {bound}")
    c_max = max(init_constants)
    ok = not mismatches and not gamma_over and c_max <= INIT_MESSAGE_CONSTANT
    detail = (f"{runs} async runs equal sync; gamma sync messages within 4R(|F|+n) on all runs; "
              f"init messages/(k*m): max {c_max:.2f}, mean {np.mean(init_constants):.2f} "
              f"(asserted c = {INIT_MESSAGE_CONSTANT})")
    if mismatches:
        detail = f"state mismatch: {mismatches[0]}"
    elif gamma_over:
        detail = f"gamma overhead: {gamma_over[0]}"
    record(9, ok, detail)


def _chi_square(params: GeomCapParams, n: int, seed: int) -> float:
    x = np.asarray(sample_offsets(params, n, seed).delta)
    observed = np.bincount(x, minlength=params.r + 1).astype(float)
    expected = np.asarray([geom_cap_pmf(params, i) for i in range(params.r + 1)]) * n
    # pool the sparse right tail so every bin expects at least 5
    obs, exp = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= 5:
            obs.append(acc_o)
            exp.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e:
        obs[-1] += acc_o
        exp[-1] += acc_e
    return float(stats.chisquare(obs, exp).pvalue)


def test_criterion_10_distribution():
    rng = random.Random(10)
    worst_sum, worst_ratio = 0.0, 0.0
    for _ in range(100):
        prm = GeomCapParams(rng.uniform(0.01, 0.99), rng.randint(0, 200))
        total = sum(geom_cap_pmf(prm, i) for i in range(prm.r + 1))
        worst_sum = max(worst_sum, abs(total - 1))
        for i in range(prm.r):
            ratio = geom_cap_pmf(prm, i) / geom_cap_tail(prm, i)
            worst_ratio = max(worst_ratio, abs(ratio - prm.p))
    pvals = [
        _chi_square(GeomCapParams(0.5, 10), 10**6, 1),
        _chi_square(GeomCapParams(0.1, 30), 10**6, 2),
        _chi_square(GeomCapParams(1 - 2 ** (-1 / 3), 4), 10**6, 3),
    ]
    ok = worst_sum <= 1e-12 and worst_ratio <= 1e-12 and min(pvals) > 0.001
    record(10, ok, f"max |sum pmf - 1| = {worst_sum:.1e}, max |pmf/tail - p| = {worst_ratio:.1e}, "
                   f"chi-square p-values {', '.join(f'{p:.3f}' for p in pvals)}")
