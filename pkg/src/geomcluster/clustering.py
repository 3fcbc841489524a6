"""Ball-growing clustering from capped geometric offsets.

Each vertex ``u`` starts a search at distance ``r - delta[u]``; vertex ``x`` joins
the minimum-ID origin among those reaching it first. This is a shortest path tree
from a virtual source attached to every vertex, with ties broken by origin ID.
"""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Optional, Sequence

import numpy as np

from .distribution import GeomCapParams, Offsets, sample_offsets
from .graph import Graph

NO_PARENT = -1

MODE_BALLS = "balls"
MODE_COMPONENTS = "components"


@dataclass(frozen=True)
class Clustering:
    """Per-vertex cluster center, level and support-forest parent.

    ``parent[v]`` is :data:`NO_PARENT` exactly for cluster centers. ``delta`` keeps
    the offsets the run was computed from (``None`` when unknown).
    """

    center: tuple[int, ...]
    level: tuple[int, ...]
    parent: tuple[int, ...]
    r: int
    p: Optional[float] = None
    seed: Optional[int] = None
    mode: str = MODE_BALLS
    delta: Optional[tuple[int, ...]] = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return len(self.center)

    def centers(self) -> list[int]:
        return sorted(set(self.center))

    def clusters(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v, c in enumerate(self.center):
            out.setdefault(c, []).append(v)
        return out

    def forest_edges(self) -> list[tuple[int, int]]:
        return [(min(v, q), max(v, q)) for v, q in enumerate(self.parent) if q != NO_PARENT]

    def inter_cluster_edges(self, g: Graph) -> list[tuple[int, int, int]]:
        return [(u, v, w) for u, v, w in g.edges if self.center[u] != self.center[v]]

    def to_json(self) -> dict:
        return {
            "params": {"p": self.p, "r": self.r, "seed": self.seed},
            "center": list(self.center),
            "level": list(self.level),
            "parent": [None if q == NO_PARENT else q for q in self.parent],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, obj: dict | str) -> "Clustering":
        if isinstance(obj, str):
            obj = json.loads(obj)
        params = obj.get("params", {})
        return cls(
            center=tuple(obj["center"]),
            level=tuple(obj["level"]),
            parent=tuple(NO_PARENT if q is None else q for q in obj["parent"]),
            r=params.get("r"),
            p=params.get("p"),
            seed=params.get("seed"),
        )


def _min_id_parents(g: Graph, center: Sequence[int], level: Sequence[int]) -> list[int]:
    # Smallest-ID same-cluster neighbor exactly one edge closer to the source.
    parent = [NO_PARENT] * g.n
    for x in range(g.n):
        if center[x] == x:
            continue
        for y, w in g.adj[x]:  # adjacency is sorted by neighbor ID
            if center[y] == center[x] and level[y] == level[x] - w:
                parent[x] = y
                break
        else:
            raise AssertionError(f"vertex {x} has no support-forest parent")
    return parent


def _lex_search(g: Graph, init: Sequence[tuple[int, int]]) -> tuple[list[int], list[int]]:
    """Multi-source search on lexicographic ``(distance, origin)`` keys.

    Every vertex ``v`` is a source with key ``init[v]``. Extending a key over an
    edge adds the weight to the distance and keeps the origin, which preserves the
    order, so Dijkstra returns the lexicographic minimum over all origins.
    """
    key = list(init)
    heap = [(d, c, v) for v, (d, c) in enumerate(key)]
    heapq.heapify(heap)
    done = [False] * g.n
    adj = g.adj
    while heap:
        d, c, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for y, w in adj[x]:
            if not done[y]:
                cand = (d + w, c)
                if cand < key[y]:
                    key[y] = cand
                    heapq.heappush(heap, (d + w, c, y))
    return [k[0] for k in key], [k[1] for k in key]


def _bfs_layers(g: Graph, start: Sequence[int], r: int) -> tuple[list[int], list[int]]:
    # Unweighted case: process levels 0..r in order; each vertex takes the
    # smallest origin ID offered by the previous layer.
    n = g.n
    level = [0] * n
    center = [0] * n
    buckets: list[list[int]] = [[] for _ in range(r + 1)]
    for v, s in enumerate(start):
        buckets[s].append(v)
    settled = [False] * n
    best = [n] * n  # best origin ID offered at the current candidate level
    offer_lvl = [-1] * n
    for lvl in range(r + 1):
        layer = []
        for v in buckets[lvl]:
            if settled[v]:
                continue
            origin = v if start[v] == lvl else n
            if offer_lvl[v] == lvl:
                origin = min(origin, best[v])
            layer.append((v, origin))
        for v, origin in layer:
            if settled[v]:
                continue
            settled[v] = True
            level[v] = lvl
            center[v] = origin
        if lvl == r:
            break
        nxt = lvl + 1
        for v, origin in layer:
            if center[v] != origin:
                continue
            for y, _ in g.adj[v]:
                if settled[y]:
                    continue
                if offer_lvl[y] != nxt:
                    offer_lvl[y] = nxt
                    best[y] = origin
                    buckets[nxt].append(y)
                elif origin < best[y]:
                    best[y] = origin
    return level, center


def cluster_with_offsets(g: Graph, r: int, delta: Offsets | Sequence[int]) -> Clustering:
    """Deterministic clustering given per-vertex offsets ``delta`` in ``0..r``."""
    d = tuple(delta.delta if isinstance(delta, Offsets) else delta)
    if len(d) != g.n:
        raise ValueError(f"need {g.n} offsets, got {len(d)}")
    if any(not 0 <= x <= r for x in d):
        raise ValueError(f"offsets must lie in [0, {r}]")
    start = [r - x for x in d]
    if g.is_unweighted:
        level, center = _bfs_layers(g, start, r)
    else:
        level, center = _lex_search(g, [(s, v) for v, s in enumerate(start)])
    parent = _min_id_parents(g, center, level)
    return Clustering(tuple(center), tuple(level), tuple(parent), r=r, delta=d)


def connected_component_clustering(g: Graph, r: int) -> Clustering:
    """Clusters are connected components centered at their minimum ID vertex.

    Levels are distances from the center, so the support forest is a shortest
    path tree of each component.
    """
    label = g.components()
    roots = set(label)
    level, center = _lex_search(
        g, [(0, v) if v in roots else (float("inf"), v) for v in range(g.n)]
    )
    parent = _min_id_parents(g, center, level)
    return Clustering(tuple(center), tuple(int(x) for x in level), tuple(parent), r=r, mode=MODE_COMPONENTS)


def is_degenerate_cap(g: Graph, r: int) -> bool:
    return r >= g.n * g.w_max


def cluster(g: Graph, p: float, r: int, seed: int = 0) -> Clustering:
    """Sample offsets from GeomCap(p, r) and cluster.

    When ``r >= n * W`` the cap exceeds any possible diameter and the connected
    components are returned instead.
    """
    params = GeomCapParams(p, r)
    offsets = sample_offsets(params, g.n, seed)
    if is_degenerate_cap(g, r):
        c = connected_component_clustering(g, r)
    else:
        c = cluster_with_offsets(g, r, offsets)
    return Clustering(
        c.center, c.level, c.parent, r=r, p=p, seed=seed, mode=c.mode, delta=offsets.delta
    )


# verification helpers


class Check(NamedTuple):
    ok: bool
    detail: Optional[str] = None
    item: Any = None  # offending vertex or edge

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class DiameterReport:
    per_cluster: dict[int, int]
    max_diameter: int
    disconnected: list[int]

    @property
    def ok(self) -> bool:
        return not self.disconnected


def strong_diameter(g: Graph, c: Clustering) -> DiameterReport:
    """Exact diameter of every cluster's induced subgraph."""
    from scipy.sparse.csgraph import shortest_path

    center = np.asarray(c.center)
    intra = [(u, v, w) for u, v, w in g.edges if center[u] == center[v]]
    per: dict[int, int] = {}
    disconnected: list[int] = []
    clusters = c.clusters()
    big = [cid for cid, members in clusters.items() if len(members) > 1]
    for cid in clusters:
        per[cid] = 0
    if big:
        sub = Graph(g.n, tuple(intra)).to_csr()
        # Only members of non-singleton clusters need a search.
        sources = np.asarray([v for cid in big for v in clusters[cid]])
        dist = shortest_path(sub, method="D", directed=False, indices=sources)
        row = {int(v): i for i, v in enumerate(sources)}
        for cid in big:
            members = clusters[cid]
            block = dist[np.ix_([row[v] for v in members], members)]
            if np.isinf(block).any():
                disconnected.append(cid)
                per[cid] = -1
            else:
                per[cid] = int(block.max())
    best = max((d for d in per.values()), default=0)
    return DiameterReport(per, best, sorted(disconnected))


def forest_height(g: Graph, c: Clustering) -> int:
    """Maximum total weight from any vertex up to its cluster center."""
    height = 0
    for v in range(c.n):
        total, x, steps = 0, v, 0
        while c.parent[x] != NO_PARENT:
            total += g.weight(x, c.parent[x])
            x = c.parent[x]
            steps += 1
            if steps > c.n:
                raise ValueError(f"parent pointers from {v} contain a cycle")
        height = max(height, total)
    return height


def verify_tree_support(
    g: Graph, c: Clustering, delta: Optional[Sequence[int]] = None
) -> Check:
    """Check every structural invariant of a clustering; report the first violation.

    The offset-dependent checks (``level[c] == r - delta[c]``, ``level[v] <= r - delta[v]``)
    run when offsets are known and the clustering is not a components fallback.
    """
    n, r = g.n, c.r
    if len(c.center) != n or len(c.level) != n or len(c.parent) != n:
        return Check(False, "array lengths do not match the graph")
    if delta is None:
        delta = c.delta
    for v in range(n):
        cv = c.center[v]
        if not 0 <= cv < n:
            return Check(False, f"vertex {v}: center {cv} out of range", v)
        if c.center[cv] != cv:
            return Check(False, f"vertex {v}: center {cv} is not its own center", v)
        if not 0 <= c.level[v] <= r:
            return Check(False, f"vertex {v}: level {c.level[v]} outside [0, {r}]", v)
    if delta is not None and c.mode == MODE_BALLS:
        for v in range(n):
            if c.level[v] > r - delta[v]:
                return Check(False, f"vertex {v}: level {c.level[v]} exceeds r - delta = {r - delta[v]}", v)
            if c.center[v] == v and c.level[v] != r - delta[v]:
                return Check(False, f"center {v}: level {c.level[v]} != r - delta = {r - delta[v]}", v)
    for v in range(n):
        q = c.parent[v]
        if q == NO_PARENT:
            if c.center[v] != v:
                return Check(False, f"vertex {v}: no parent but not a center", v)
            continue
        if c.center[v] == v:
            return Check(False, f"center {v} has parent {q}", v)
        if not 0 <= q < n or not g.has_edge(v, q):
            return Check(False, f"vertex {v}: parent {q} is not a neighbor", v)
        if c.center[q] != c.center[v]:
            return Check(False, f"vertex {v}: parent {q} lies in another cluster", v)
        if c.level[q] != c.level[v] - g.weight(v, q):
            return Check(False, f"vertex {v}: parent {q} is not one edge closer to the source", v)
    for v in range(n):
        total, x = 0, v
        while c.parent[x] != NO_PARENT:
            total += g.weight(x, c.parent[x])
            x = c.parent[x]
        if x != c.center[v]:
            return Check(False, f"vertex {v}: parent chain ends at {x}, not center {c.center[v]}", v)
        if total > r:
            return Check(False, f"vertex {v}: tree path to center has weight {total} > r = {r}", v)
    return Check(True)
