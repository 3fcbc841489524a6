"""Sparsified inter-cluster edges and (2k-1)-spanners on unweighted graphs."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .clustering import (
    Check,
    Clustering,
    cluster,
    connected_component_clustering,
)
from .graph import Graph

EdgeKey = tuple[int, int]


def _key(u: int, v: int) -> EdgeKey:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class SparsifiedDecomposition:
    clustering: Clustering
    F: frozenset[EdgeKey]
    k: int
    H: frozenset[EdgeKey]

    @property
    def size_F(self) -> int:
        return len(self.F)

    @property
    def size_H(self) -> int:
        return len(self.H)

    def inter_cluster_F(self) -> list[EdgeKey]:
        c = self.clustering.center
        return sorted(e for e in self.F if c[e[0]] != c[e[1]])

    def summary(self, g: Graph, max_stretch: Optional[float] = None) -> dict:
        return {
            "k": self.k,
            "n": g.n,
            "m": g.m,
            "size_F": self.size_F,
            "size_H": self.size_H,
            "max_stretch": max_stretch,
        }


def select_representatives(
    level_x: int, center_x: int, nbrs: Iterable[tuple[int, int, int]]
) -> list[int]:
    """Neighbors ``y`` that vertex ``x`` links to, given ``(y, level[y], center[y])``.

    One per neighboring cluster seen one level below ``x``, or at ``x``'s level
    with a smaller center ID than ``x``'s own; within a cluster the neighbor of
    minimum (level, ID) represents it. Uses only what ``x`` learns from its
    neighbors, so the distributed nodes apply it verbatim.
    """
    best: dict[int, tuple[int, int]] = {}
    for y, ly, cy in nbrs:
        if ly == level_x - 1 or (ly == level_x and cy < center_x):
            cand = (ly, y)
            if cy not in best or cand < best[cy]:
                best[cy] = cand
    return sorted(y for _, y in best.values())


def sparsify_vertex(g: Graph, c: Clustering, x: int) -> list[EdgeKey]:
    nbrs = ((y, c.level[y], c.center[y]) for y, _ in g.adj[x])
    return [_key(x, y) for y in select_representatives(c.level[x], c.center[x], nbrs)]


def sparsify(g: Graph, c: Clustering) -> frozenset[EdgeKey]:
    if not g.is_unweighted:
        raise ValueError("sparsify requires an unweighted graph")
    out: set[EdgeKey] = set()
    for x in range(g.n):
        out.update(sparsify_vertex(g, c, x))
    return frozenset(out)


def spanner_params(n: int, k: int) -> tuple[float, int]:
    """``(p, r) = (1 - n^(-1/k), k - 1)``."""
    if k < 2:
        raise ValueError("k must be >= 2")
    return 1.0 - n ** (-1.0 / k), k - 1


def assemble(g: Graph, c: Clustering, k: int) -> SparsifiedDecomposition:
    F = sparsify(g, c)
    H = frozenset(F | set(c.forest_edges()))
    return SparsifiedDecomposition(c, F, k, H)


def build_spanner(g: Graph, k: int, seed: int = 0) -> SparsifiedDecomposition:
    if not g.is_unweighted:
        raise ValueError("build_spanner requires an unweighted graph")
    p, r = spanner_params(g.n, k)
    if g.n == 1:
        # p = 0 is outside GeomCap's domain; a single vertex is its own cluster.
        c = connected_component_clustering(g, r)
    else:
        c = cluster(g, p, r, seed)
    return assemble(g, c, k)


def verify_coverage(g: Graph, d: SparsifiedDecomposition) -> Check:
    """Every edge (u, v) needs an F-edge from u into v's cluster or from v into u's."""
    center = d.clustering.center
    reach: set[tuple[int, int]] = set()
    for a, b in d.F:
        if not g.has_edge(a, b):
            return Check(False, f"F edge ({a},{b}) is not an edge of G", (a, b))
        reach.add((a, center[b]))
        reach.add((b, center[a]))
    for u, v, _ in g.edges:
        if (u, center[v]) not in reach and (v, center[u]) not in reach:
            return Check(False, f"edge ({u},{v}) is not covered", (u, v))
    return Check(True)


@dataclass
class StretchReport:
    max_stretch: float
    worst_edge: Optional[EdgeKey]
    disconnected: list[EdgeKey]
    bound: Optional[float] = None

    @property
    def ok(self) -> bool:
        if self.disconnected:
            return False
        return self.bound is None or self.max_stretch <= self.bound


def verify_stretch(g: Graph, H: Iterable[EdgeKey], bound: Optional[float] = None) -> StretchReport:
    """Maximum of ``d_H(u, v) / w(u, v)`` over the edges of G.

    Checking edges suffices: a shortest path in G is a sequence of edges, each
    replaced by an H-path at most ``bound`` times as long.
    """
    from scipy.sparse.csgraph import shortest_path

    h = g.subgraph_edges(H)
    if g.m == 0:
        return StretchReport(1.0, None, [], bound)
    sources = sorted({u for u, _, _ in g.edges})
    dist = shortest_path(h.to_csr(), method="D", directed=False, indices=sources)
    row = {u: i for i, u in enumerate(sources)}
    worst, worst_edge = 0.0, None
    broken: list[EdgeKey] = []
    for u, v, w in g.edges:
        dh = dist[row[u], v]
        if math.isinf(dh):
            broken.append((u, v))
            continue
        ratio = dh / w
        if ratio > worst:
            worst, worst_edge = ratio, (u, v)
    if broken:
        worst = math.inf
        worst_edge = broken[0]
    return StretchReport(worst, worst_edge, broken, bound)


def write_spanner(g: Graph, d: SparsifiedDecomposition) -> str:
    """H as an edge list in the graph file format."""
    lines = [f"{g.n} {d.size_H}"]
    lines.extend(f"{u} {v}" for u, v in sorted(d.H))
    return "\n".join(lines) + "\n"


def summary_json(g: Graph, d: SparsifiedDecomposition, max_stretch: Optional[float]) -> str:
    return json.dumps(d.summary(g, max_stretch), sort_keys=True)


def size_bound_F(n: int, k: int) -> float:
    return 2.0 * n ** (1.0 + 1.0 / k)


def mean_ci95(values: Iterable[float]) -> tuple[float, float, float]:
    """Sample mean with a normal-approximation 95% interval."""
    arr = np.asarray(list(values), dtype=np.float64)
    mu = float(arr.mean())
    if arr.size < 2:
        return mu, mu, mu
    half = 1.96 * float(arr.std(ddof=1)) / math.sqrt(arr.size)
    return mu, mu - half, mu + half
