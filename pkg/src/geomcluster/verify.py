"""Slow, independent oracles for checking the clustering pipeline."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import total_ordering
from typing import Sequence

import numpy as np

from .clustering import Clustering
from .distribution import Offsets
from .graph import Graph

APSP_CAP = 2000


@total_ordering
@dataclass(frozen=True)
class FractionalKey:
    """Exact value ``dist + ident / (N + 1)`` for integer ``dist`` and ``0 <= ident <= N``.

    Since the fractional part lies in [0, 1), ordering by ``(dist, ident)``
    coincides with ordering by the rational value.
    """

    dist: int
    ident: int

    def __lt__(self, other: "FractionalKey") -> bool:
        return (self.dist, self.ident) < (other.dist, other.ident)

    def __add__(self, w: int) -> "FractionalKey":
        return FractionalKey(self.dist + w, self.ident)

    def as_fraction(self, n_ids: int):
        from fractions import Fraction

        return self.dist + Fraction(self.ident, n_ids + 1)


@dataclass(frozen=True)
class OracleClustering:
    center: tuple[int, ...]
    level: tuple[int, ...]


def oracle_cluster_fractional(g: Graph, r: int, delta: Offsets | Sequence[int]) -> OracleClustering:
    """Textbook Dijkstra from an explicit source ``s`` joined to every vertex ``v``
    by an edge of weight ``r - delta[v] + v/(n+1)``.
    """
    d = list(delta.delta if isinstance(delta, Offsets) else delta)
    n = g.n
    s = n
    # Adjacency of the augmented graph: graph edges carry integer weights,
    # source edges carry fractional keys.
    source_edges = [(v, FractionalKey(r - d[v], v)) for v in range(n)]
    dist: list[FractionalKey | None] = [None] * (n + 1)
    visited = [False] * (n + 1)
    counter = 0
    heap: list[tuple[FractionalKey, int, int]] = []
    visited[s] = True
    for v, key in source_edges:
        if dist[v] is None or key < dist[v]:
            dist[v] = key
            heapq.heappush(heap, (key, counter, v))
            counter += 1
    while heap:
        key, _, x = heapq.heappop(heap)
        if visited[x] or key != dist[x]:
            continue
        visited[x] = True
        for y, w in g.adj[x]:
            cand = key + w
            if dist[y] is None or cand < dist[y]:
                dist[y] = cand
                heapq.heappush(heap, (cand, counter, y))
                counter += 1
    return OracleClustering(
        center=tuple(dist[v].ident for v in range(n)),
        level=tuple(dist[v].dist for v in range(n)),
    )


def apsp(g: Graph, cap: int = APSP_CAP) -> np.ndarray:
    """All-pairs distances as a float matrix (``inf`` when unreachable)."""
    from scipy.sparse.csgraph import shortest_path

    if g.n > cap:
        raise ValueError(f"apsp limited to n <= {cap}, got {g.n}")
    return shortest_path(g.to_csr(), method="D", directed=False)


def brute_force_Cx(
    g: Graph, c: Clustering, x: int, dist: np.ndarray | None = None
) -> set[tuple[int, int]]:
    """All edges ``(x, y)`` that some admissible fixed-path choice places in C(x).

    ``u`` contributes when its path length to ``x`` equals the level of ``x``, or
    exceeds it by one with ``u`` of smaller ID than ``x``'s center. Any neighbor
    ``y`` of ``x`` lying on a shortest ``u``-``x`` path is an admissible predecessor.
    """
    if c.delta is None:
        raise ValueError("clustering carries no offsets")
    if dist is None:
        dist = apsp(g)
    r, delta = c.r, c.delta
    lx, cx = c.level[x], c.center[x]
    out: set[tuple[int, int]] = set()
    for u in range(g.n):
        dux = dist[u, x]
        if u == x or np.isinf(dux):
            continue
        length = r - delta[u] + int(dux)
        if length == lx or (length == lx + 1 and u < cx):
            for y, w in g.adj[x]:
                if dist[u, y] + w == dux:
                    out.add((min(x, y), max(x, y)))
    return out
